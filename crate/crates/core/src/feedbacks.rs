//! Carbon-cycle tipping feedbacks: Amazon dieback and permafrost thaw.
//!
//! Both run inside the emulator loop through [`FeedbackHook`]; what they emit
//! in year `t` enters the carbon cycle in `t + 1`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::climate::{ExtraEmissions, FeedbackHook};
use crate::dist::DistSpec;
use crate::error::{Error, Result};
use crate::rng;

const CO2_PER_C: f64 = 44.0 / 12.0;
/// Mt CH4 per Gt of carbon.
const MT_CH4_PER_GTC: f64 = 1000.0 * 16.0 / 12.0;

/// Linear-above-threshold annual hazard, clamped to [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HazardParams {
    /// GMST anomaly below which the hazard is zero, degrees C.
    pub threshold: f64,
    /// Hazard per degree above the threshold.
    pub slope: f64,
}

impl HazardParams {
    pub fn hazard(&self, gmst: f64) -> f64 {
        (self.slope * (gmst - self.threshold).max(0.0)).clamp(0.0, 1.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AmazonConfig {
    pub start_year: i32,
    pub hazard: HazardParams,
    /// Total release once triggered, Gt CO2.
    pub budget: f64,
    /// Release duration in years.
    pub duration: DistSpec,
}

impl Default for AmazonConfig {
    fn default() -> Self {
        Self {
            start_year: 2010,
            hazard: HazardParams { threshold: 1.0, slope: 0.05 },
            budget: 183.0,
            duration: DistSpec::new("triangular", &[10.0, 50.0, 250.0]),
        }
    }
}

/// Each parameter is drawn from a normal truncated at zero; the two
/// fractions are also capped at one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PermafrostConfig {
    pub start_year: i32,
    /// Frozen carbon, GtC.
    pub init_stock: DistSpec,
    /// Fraction of the frozen stock thawing per year per degree of GMST.
    pub thaw_rate: DistSpec,
    /// Fraction of the thawed active pool decomposing per year.
    pub decomp_rate: DistSpec,
    /// Share of decomposed carbon released as CH4.
    pub ch4_frac: DistSpec,
    /// Share of thawed carbon entering the inert passive pool.
    pub passive_frac: DistSpec,
}

impl Default for PermafrostConfig {
    fn default() -> Self {
        let inf = f64::INFINITY;
        Self {
            start_year: 2010,
            init_stock: DistSpec::new("truncnormal", &[1035.0, 150.0, 0.0, inf]),
            thaw_rate: DistSpec::new("truncnormal", &[8e-4, 2e-4, 0.0, inf]),
            decomp_rate: DistSpec::new("truncnormal", &[0.014, 0.004, 0.0, 1.0]),
            ch4_frac: DistSpec::new("truncnormal", &[0.023, 0.006, 0.0, 1.0]),
            passive_frac: DistSpec::new("truncnormal", &[0.4, 0.1, 0.0, 1.0]),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeedbackConfig {
    pub amazon: bool,
    pub permafrost: bool,
    pub amazon_params: AmazonConfig,
    pub permafrost_params: PermafrostConfig,
}

impl Default for FeedbackConfig {
    fn default() -> Self {
        Self {
            amazon: true,
            permafrost: true,
            amazon_params: AmazonConfig::default(),
            permafrost_params: PermafrostConfig::default(),
        }
    }
}

impl FeedbackConfig {
    pub fn validate(&self) -> Vec<String> {
        let mut e = Vec::new();
        let a = &self.amazon_params;
        if !(a.budget.is_finite() && a.budget >= 0.0) {
            e.push("feedbacks.amazon_params.budget must be non-negative".into());
        }
        if !(a.hazard.slope >= 0.0 && a.hazard.threshold.is_finite()) {
            e.push("feedbacks.amazon_params.hazard: slope must be non-negative".into());
        }
        e.extend(a.duration.check("feedbacks.amazon_params.duration"));
        if a.duration.params.first().is_some_and(|&lo| lo < 1.0) {
            e.push("feedbacks.amazon_params.duration: lower bound must be at least one year".into());
        }
        let p = &self.permafrost_params;
        for (n, d) in [
            ("init_stock", &p.init_stock),
            ("thaw_rate", &p.thaw_rate),
            ("decomp_rate", &p.decomp_rate),
            ("ch4_frac", &p.ch4_frac),
            ("passive_frac", &p.passive_frac),
        ] {
            e.extend(d.check(&format!("feedbacks.permafrost_params.{n}")));
        }
        e
    }

    /// Parses `on|off|amazon|permafrost`.
    pub fn set_mode(&mut self, mode: &str) -> Result<()> {
        let (a, p) = match mode {
            "on" => (true, true),
            "off" => (false, false),
            "amazon" => (true, false),
            "permafrost" => (false, true),
            _ => return Err(Error::Argument(format!("feedbacks must be on|off|amazon|permafrost, got `{mode}`"))),
        };
        self.amazon = a;
        self.permafrost = p;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AmazonState {
    /// Per-trial uniform draw compared against the hazard.
    pub u: f64,
    pub duration: f64,
    pub budget: f64,
    pub triggered: Option<i32>,
    /// Cumulative release, Gt CO2.
    pub released: f64,
    years_released: u32,
}

impl AmazonState {
    pub fn new(u: f64, duration: f64, budget: f64) -> Self {
        Self { u, duration, budget, triggered: None, released: 0.0, years_released: 0 }
    }

    pub fn finished(&self) -> bool {
        self.triggered.is_some() && self.released == self.budget
    }
}

/// Advances one year. Returns this year's release in Gt CO2.
pub fn amazon_step(s: &mut AmazonState, year: i32, gmst: f64, hazard: &HazardParams) -> f64 {
    if s.triggered.is_none() {
        if s.u < hazard.hazard(gmst) {
            s.triggered = Some(year);
        } else {
            return 0.0;
        }
    }
    let n = (s.duration.ceil() as u32).max(1);
    if s.years_released >= n {
        return 0.0;
    }
    s.years_released += 1;
    if s.years_released == n {
        let rest = (s.budget - s.released).max(0.0);
        s.released = s.budget;
        rest
    } else {
        let rate = s.budget / s.duration;
        s.released += rate;
        rate
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PermafrostParams {
    pub init_stock: f64,
    pub thaw_rate: f64,
    pub decomp_rate: f64,
    pub ch4_frac: f64,
    pub passive_frac: f64,
}

/// Carbon reservoirs in GtC.
#[derive(Debug, Clone, PartialEq)]
pub struct PermafrostState {
    pub params: PermafrostParams,
    pub frozen: f64,
    pub active: f64,
    pub passive: f64,
    pub emitted_co2_c: f64,
    pub emitted_ch4_c: f64,
}

impl PermafrostState {
    pub fn new(params: PermafrostParams) -> Self {
        Self { params, frozen: params.init_stock, active: 0.0, passive: 0.0, emitted_co2_c: 0.0, emitted_ch4_c: 0.0 }
    }

    pub fn total(&self) -> f64 {
        self.frozen + self.active + self.passive + self.emitted_co2_c + self.emitted_ch4_c
    }
}

/// Advances one year. Returns (Gt CO2, Mt CH4).
pub fn permafrost_step(s: &mut PermafrostState, gmst: f64) -> (f64, f64) {
    let p = s.params;
    let thaw = (p.thaw_rate * gmst.max(0.0) * s.frozen).min(s.frozen);
    s.frozen -= thaw;
    let to_passive = p.passive_frac * thaw;
    s.passive += to_passive;
    s.active += thaw - to_passive;
    let decomp = (p.decomp_rate * s.active).min(s.active);
    s.active -= decomp;
    let c_ch4 = p.ch4_frac * decomp;
    let c_co2 = decomp - c_ch4;
    s.emitted_ch4_c += c_ch4;
    s.emitted_co2_c += c_co2;
    (c_co2 * CO2_PER_C, c_ch4 * MT_CH4_PER_GTC)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeedbackStates {
    pub amazon: AmazonState,
    pub permafrost: PermafrostState,
}

/// Draws the per-trial feedback state from the trial's own stream.
pub fn sample_feedback_states(seed: u64, trial_id: u64, cfg: &FeedbackConfig) -> FeedbackStates {
    let mut r = rng::stream(seed, trial_id, "feedbacks");
    let u: f64 = r.random();
    let a = &cfg.amazon_params;
    let duration = a.duration.sample(&mut r);
    let p = &cfg.permafrost_params;
    let params = PermafrostParams {
        init_stock: p.init_stock.sample(&mut r).max(0.0),
        thaw_rate: p.thaw_rate.sample(&mut r).max(0.0),
        decomp_rate: p.decomp_rate.sample(&mut r).clamp(0.0, 1.0),
        ch4_frac: p.ch4_frac.sample(&mut r).clamp(0.0, 1.0),
        passive_frac: p.passive_frac.sample(&mut r).clamp(0.0, 1.0),
    };
    FeedbackStates { amazon: AmazonState::new(u, duration, a.budget), permafrost: PermafrostState::new(params) }
}

/// Emulator hook driving both feedbacks; a disabled feedback never advances.
pub struct CarbonFeedbacks<'a> {
    pub states: FeedbackStates,
    cfg: &'a FeedbackConfig,
}

impl<'a> CarbonFeedbacks<'a> {
    pub fn new(states: FeedbackStates, cfg: &'a FeedbackConfig) -> Self {
        Self { states, cfg }
    }
}

impl FeedbackHook for CarbonFeedbacks<'_> {
    fn step(&mut self, year: i32, gmst: f64) -> ExtraEmissions {
        let mut x = ExtraEmissions::default();
        if self.cfg.amazon && year >= self.cfg.amazon_params.start_year {
            x.co2 += amazon_step(&mut self.states.amazon, year, gmst, &self.cfg.amazon_params.hazard);
        }
        if self.cfg.permafrost && year >= self.cfg.permafrost_params.start_year {
            let (c, m) = permafrost_step(&mut self.states.permafrost, gmst);
            x.co2 += c;
            x.ch4 += m;
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn amazon_releases_exact_budget() {
        let h = HazardParams { threshold: 1.0, slope: 1.0 };
        for d in [10.0, 37.4, 50.0, 249.9] {
            let mut s = AmazonState::new(0.0, d, 183.0);
            let mut total = 0.0;
            let mut years = 0;
            for y in 0..400 {
                let e = amazon_step(&mut s, 2000 + y, 2.0, &h);
                if e > 0.0 {
                    years += 1;
                }
                total += e;
            }
            assert!((total - 183.0).abs() < 1e-9, "{d}: {total}");
            assert_eq!(years, d.ceil() as i32);
            assert!(s.finished());
        }
    }

    #[test]
    fn below_threshold_never_triggers() {
        let h = HazardParams { threshold: 1.5, slope: 0.5 };
        let mut s = AmazonState::new(0.0, 50.0, 183.0);
        for y in 0..100 {
            assert_eq!(amazon_step(&mut s, y, 1.4, &h), 0.0);
        }
        assert!(s.triggered.is_none());
    }

    #[test]
    fn fully_passive_permafrost_emits_nothing() {
        let p = PermafrostParams { init_stock: 1000.0, thaw_rate: 0.01, decomp_rate: 0.1, ch4_frac: 0.1, passive_frac: 1.0 };
        let mut s = PermafrostState::new(p);
        for _ in 0..300 {
            assert_eq!(permafrost_step(&mut s, 3.0), (0.0, 0.0));
        }
        assert!((s.total() - 1000.0).abs() < 1e-9);
    }

    #[test]
    fn mode_strings() {
        let mut c = FeedbackConfig::default();
        c.set_mode("amazon").unwrap();
        assert!(c.amazon && !c.permafrost);
        assert!(c.set_mode("sometimes").is_err());
    }

    #[test]
    fn sampling_is_deterministic() {
        let c = FeedbackConfig::default();
        assert_eq!(sample_feedback_states(1, 2, &c), sample_feedback_states(1, 2, &c));
        assert_ne!(sample_feedback_states(1, 2, &c), sample_feedback_states(1, 3, &c));
    }
}
