//! U.S.-specific social cost of greenhouse gases.
//!
//! Scenario synthesis, a reduced-complexity climate emulator with carbon
//! feedbacks, pattern scaling to U.S. temperature, eight macroeconomic damage
//! families, nonmarket damages, Ramsey discounting and the Monte Carlo pipeline
//! that combines them.

pub mod cli_io;
pub mod climate;
pub mod damages_macro;
pub mod damages_nonmarket;
pub mod discounting;
pub mod dist;
pub mod error;
pub mod feedbacks;
mod par;
pub mod patterns;
pub mod rng;
pub mod scenario;
pub mod scghg;
pub mod stats;

pub use error::{Error, Result};
