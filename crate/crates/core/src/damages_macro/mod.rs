//! Macroeconomic damage functions for eight empirical studies.
//!
//! Each study maps to one of eight dynamic families. A family turns a U.S.
//! temperature path into a log output gap `ln(Y/Y_cf)` relative to a
//! counterfactual held at the baseline temperature `t_base`; losses are
//! reported as `1 - exp(gap)`.

mod families;
pub mod surface;

use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::patterns::UsTempPath;

pub use families::TempSeries;
pub use surface::{fit_damage_surface, fit_ols_quadratic, fit_quantile_quadratic, pinball_loss, DamageSurface};

/// Default U.S. baseline temperature (1980-2010 mean), degrees C.
pub const T_BASE: f64 = 13.62;
/// U.S. temperature at which impulse responses are reported by default.
pub const T_EVAL: f64 = 16.3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Study {
    Burke,
    Newell,
    Kalkuhl,
    Acevedo,
    Kahn,
    Casey,
    Harding,
    Nath,
}

impl Study {
    pub const ALL: [Study; 8] = [
        Study::Burke,
        Study::Newell,
        Study::Kalkuhl,
        Study::Acevedo,
        Study::Kahn,
        Study::Casey,
        Study::Harding,
        Study::Nath,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Study::Burke => "burke",
            Study::Newell => "newell",
            Study::Kalkuhl => "kalkuhl",
            Study::Acevedo => "acevedo",
            Study::Kahn => "kahn",
            Study::Casey => "casey",
            Study::Harding => "harding",
            Study::Nath => "nath",
        }
    }

    fn default_payload(self) -> &'static str {
        match self {
            Study::Burke => include_str!("../../payloads/burke.toml"),
            Study::Newell => include_str!("../../payloads/newell.toml"),
            Study::Kalkuhl => include_str!("../../payloads/kalkuhl.toml"),
            Study::Acevedo => include_str!("../../payloads/acevedo.toml"),
            Study::Kahn => include_str!("../../payloads/kahn.toml"),
            Study::Casey => include_str!("../../payloads/casey.toml"),
            Study::Harding => include_str!("../../payloads/harding.toml"),
            Study::Nath => include_str!("../../payloads/nath.toml"),
        }
    }

    /// Built-in payload with the given baseline temperature.
    pub fn default_spec(self) -> MacroSpec {
        MacroSpec::from_toml(self.default_payload()).expect("built-in payload parses")
    }
}

impl std::fmt::Display for Study {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Study {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Study::ALL
            .into_iter()
            .find(|x| x.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Argument(format!("unknown study `{s}`")))
    }
}

/// Quadratic in temperature: `b1 T + b2 T^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quad {
    pub b1: f64,
    pub b2: f64,
}

impl Quad {
    #[inline]
    pub fn at(self, t: f64) -> f64 {
        t * (self.b1 + self.b2 * t)
    }

    pub fn slope(self, t: f64) -> f64 {
        self.b1 + 2.0 * self.b2 * t
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FirDriver {
    Levels,
    Innovations,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum Family {
    /// Growth rate shifted every year by `q(T) - q(t_base)`.
    PermanentGrowth { b1: f64, b2: f64 },
    /// Output level shifted by `q(T) - q(t_base)`.
    LevelQuadratic { b1: f64, b2: f64 },
    /// Level form of a level x first-difference interaction with one lag.
    LevelInteracted { b1: f64, b2: f64, lag_b1: f64, lag_b2: f64 },
    /// Per-horizon quadratic weights `[b1, b2]` on lagged temperature.
    FiniteImpulse { driver: FirDriver, weights: Vec<[f64; 2]> },
    /// Growth driven by deviations from a trailing mean with AR growth lags.
    ArdlAdaptation { window: usize, ar: Vec<f64>, pos: Vec<f64>, neg: Vec<f64>, trend: f64 },
    /// TFP growth shocks with AR carry-over feeding a Solow capital block.
    TfpSolow { b1: f64, b2: f64, carry: f64, alpha: f64, saving: f64, depreciation: f64, growth: f64 },
    /// Output gap with partial carry-over each year.
    Convergence { b1: f64, b2: f64, carry: f64 },
    /// Response ratio that depends on trailing-mean temperature.
    StateDependentCrr { knots: Vec<[f64; 2]>, smoothing: f64, window: usize, horizon: usize, persistence: f64 },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::PermanentGrowth { .. } => "permanent_growth",
            Family::LevelQuadratic { .. } => "level_quadratic",
            Family::LevelInteracted { .. } => "level_interacted",
            Family::FiniteImpulse { .. } => "finite_impulse",
            Family::ArdlAdaptation { .. } => "ardl_adaptation",
            Family::TfpSolow { .. } => "tfp_solow",
            Family::Convergence { .. } => "convergence",
            Family::StateDependentCrr { .. } => "state_dependent_crr",
        }
    }
}

fn default_t_base() -> f64 {
    T_BASE
}

/// A study's damage function: family plus payload coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MacroSpec {
    pub study: Study,
    #[serde(default = "default_t_base")]
    pub t_base: f64,
    /// Relative standard error used for impulse-response bands.
    #[serde(default)]
    pub rel_se: f64,
    pub model: Family,
}

impl MacroSpec {
    pub fn from_toml(s: &str) -> Result<Self> {
        let spec: MacroSpec = toml::from_str(s).map_err(|e| Error::config(format!("damage payload: {e}")))?;
        let errs = spec.validate();
        if !errs.is_empty() {
            return Err(Error::Config(errs));
        }
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path)?;
        Self::from_toml(&s).map_err(|e| match e {
            Error::Config(v) => Error::Config(v.into_iter().map(|m| format!("{}: {m}", path.display())).collect()),
            other => other,
        })
    }

    pub fn validate(&self) -> Vec<String> {
        let mut e = Vec::new();
        let s = self.study;
        if !self.t_base.is_finite() {
            e.push(format!("{s}: t_base must be finite"));
        }
        if !(self.rel_se >= 0.0) {
            e.push(format!("{s}: rel_se must be non-negative"));
        }
        let unit = |x: f64| (0.0..1.0).contains(&x);
        match &self.model {
            Family::FiniteImpulse { weights, .. } if weights.is_empty() => {
                e.push(format!("{s}: finite_impulse needs at least one horizon"))
            }
            Family::ArdlAdaptation { window, ar, pos, neg, trend } => {
                if *window == 0 {
                    e.push(format!("{s}: window must be positive"));
                }
                if pos.len() != neg.len() || pos.is_empty() {
                    e.push(format!("{s}: pos and neg need the same non-zero length"));
                }
                if ar.iter().map(|a| a.abs()).sum::<f64>() >= 1.0 {
                    e.push(format!("{s}: AR coefficients must sum below one in magnitude"));
                }
                if !trend.is_finite() {
                    e.push(format!("{s}: trend must be finite"));
                }
            }
            Family::TfpSolow { carry, alpha, saving, depreciation, growth, .. } => {
                if !unit(*carry) {
                    e.push(format!("{s}: carry must lie in [0, 1)"));
                }
                if !(*alpha > 0.0 && *alpha < 1.0 && *saving > 0.0 && *saving < 1.0) {
                    e.push(format!("{s}: alpha and saving must lie in (0, 1)"));
                }
                if !(*depreciation > 0.0 && *depreciation <= 1.0 && *growth > -*depreciation) {
                    e.push(format!("{s}: need 0 < depreciation <= 1 and growth + depreciation > 0"));
                }
            }
            Family::Convergence { carry, .. } if !unit(*carry) => {
                e.push(format!("{s}: carry must lie in [0, 1)"))
            }
            Family::StateDependentCrr { knots, smoothing, window, horizon, persistence } => {
                if knots.len() < 2 || knots.windows(2).any(|w| w[1][0] <= w[0][0]) {
                    e.push(format!("{s}: need two or more knots with increasing temperature"));
                }
                if knots.windows(2).any(|w| w[1][1] > w[0][1]) {
                    e.push(format!("{s}: response ratio must be non-increasing in temperature"));
                }
                if !(*smoothing >= 0.0) || *window == 0 || *horizon == 0 {
                    e.push(format!("{s}: smoothing >= 0, window > 0 and horizon > 0 required"));
                }
                if !(*persistence > 0.0 && *persistence < 1.0) {
                    e.push(format!("{s}: persistence must lie in (0, 1)"));
                }
            }
            _ => {}
        }
        e
    }

    /// Same spec with a different baseline temperature.
    pub fn with_t_base(&self, t_base: f64) -> Self {
        Self { t_base, ..self.clone() }
    }
}

/// Fractional output loss per year of the damage grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DamagePath {
    pub start_year: i32,
    /// `ln(Y / Y_cf)`.
    pub log_gap: Vec<f64>,
}

impl DamagePath {
    pub fn loss(&self, i: usize) -> f64 {
        -self.log_gap[i].exp_m1()
    }

    pub fn losses(&self) -> Vec<f64> {
        (0..self.log_gap.len()).map(|i| self.loss(i)).collect()
    }

    pub fn loss_at(&self, year: i32) -> Option<f64> {
        let i = year - self.start_year;
        (i >= 0 && (i as usize) < self.log_gap.len()).then(|| self.loss(i as usize))
    }
}

/// Runs a family over `grid_len` years from `grid_start`. Years of `us` before
/// `grid_start` serve as history for lags and trailing means.
pub fn run_damage(spec: &MacroSpec, us: &UsTempPath, grid_start: i32, grid_len: usize) -> Result<DamagePath> {
    let off = grid_start - us.start_year;
    if off < 0 || us.end_year() < grid_start + grid_len as i32 - 1 {
        return Err(Error::Range { year: grid_start, start: us.start_year, end: us.end_year() });
    }
    let off = off as usize;
    let ts = TempSeries::new(&us.level[..off], &us.level[off..off + grid_len], spec.t_base);
    let log_gap = families::simulate(spec, &ts);
    if let Some(k) = log_gap.iter().position(|g| !g.is_finite()) {
        return Err(Error::Numerical { what: format!("damage family {}", spec.study), year: grid_start + k as i32 });
    }
    Ok(DamagePath { start_year: grid_start, log_gap })
}

/// Impulse response of `ln GDP` to a one-year +1 C shock (reversed the next
/// year) around a constant temperature `t_eval`.
///
/// Computed as a central difference of two shocked runs of size `+/- eps/2`
/// divided by `eps`, with the counterfactual set to `t_eval`. Exact for
/// quadratic families; a linearisation for the rest.
#[derive(Debug, Clone, PartialEq)]
pub struct Irf {
    pub study: Study,
    pub response: Vec<f64>,
    pub lo95: Vec<f64>,
    pub hi95: Vec<f64>,
}

pub fn impulse_response(spec: &MacroSpec, horizon: usize, t_eval: f64) -> Result<Irf> {
    if !t_eval.is_finite() {
        return Err(Error::Argument("t_eval must be finite".into()));
    }
    let eps = 1e-3;
    let mut s = spec.with_t_base(t_eval);
    if let Family::ArdlAdaptation { trend, .. } = &mut s.model {
        *trend = 0.0;
    }
    let hist = vec![t_eval; 128];
    let run = |d: f64| {
        let mut p = vec![t_eval; horizon + 1];
        p[0] += d;
        families::simulate(&s, &TempSeries::new(&hist, &p, t_eval))
    };
    let up = run(0.5 * eps);
    let dn = run(-0.5 * eps);
    let response: Vec<f64> = up.iter().zip(&dn).map(|(u, d)| (u - d) / eps).collect();
    let z = 1.96 * spec.rel_se;
    let (lo95, hi95) = response
        .iter()
        .map(|&r| {
            let (a, b) = (r * (1.0 - z), r * (1.0 + z));
            (a.min(b), a.max(b))
        })
        .unzip();
    Ok(Irf { study: spec.study, response, lo95, hi95 })
}

/// Temperature of peak output, `-b1 / (2 b2)` of the family's combined quadratic.
pub fn optimum_of(spec: &MacroSpec) -> Result<f64> {
    let (b1, b2) = match &spec.model {
        Family::PermanentGrowth { b1, b2 }
        | Family::LevelQuadratic { b1, b2 }
        | Family::Convergence { b1, b2, .. }
        | Family::TfpSolow { b1, b2, .. } => (*b1, *b2),
        Family::LevelInteracted { b1, b2, lag_b1, lag_b2 } => (b1 + lag_b1, b2 + lag_b2),
        Family::FiniteImpulse { weights, .. } => weights.iter().fold((0.0, 0.0), |a, w| (a.0 + w[0], a.1 + w[1])),
        Family::StateDependentCrr { knots, .. } => return families::crr_zero(knots),
        Family::ArdlAdaptation { .. } => {
            return Err(Error::Domain(format!("{}: family has no temperature optimum", spec.study)))
        }
    };
    if !(b2 < 0.0) {
        return Err(Error::NoOptimum(b2));
    }
    Ok(-b1 / (2.0 * b2))
}

/// Loads every study's payload, overriding built-ins from `dir` when a
/// `<study>.toml` exists there.
pub fn load_payloads(dir: Option<&Path>) -> Result<Vec<MacroSpec>> {
    let mut out = Vec::new();
    let mut errs = Vec::new();
    for s in Study::ALL {
        let spec = match dir.map(|d| d.join(format!("{}.toml", s.as_str()))) {
            Some(p) if p.exists() => MacroSpec::load(&p),
            _ => Ok(s.default_spec()),
        };
        match spec {
            Ok(sp) if sp.study != s => errs.push(format!("payload for {s} declares study {}", sp.study)),
            Ok(sp) => out.push(sp),
            Err(Error::Config(v)) => errs.extend(v),
            Err(e) => return Err(e),
        }
    }
    if errs.is_empty() {
        Ok(out)
    } else {
        Err(Error::Config(errs))
    }
}

pub fn write_irf<W: std::io::Write>(irfs: &[Irf], w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["study", "horizon", "response", "lo95", "hi95"])?;
    let mut sorted: Vec<&Irf> = irfs.iter().collect();
    sorted.sort_by_key(|i| i.study.as_str());
    for irf in sorted {
        for h in 0..irf.response.len() {
            wtr.write_record([
                irf.study.as_str().to_string(),
                h.to_string(),
                irf.response[h].to_string(),
                irf.lo95[h].to_string(),
                irf.hi95[h].to_string(),
            ])?;
        }
    }
    wtr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests;
