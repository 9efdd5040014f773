//! Ramsey discounting, two-good rates, certainty-equivalent term structures
//! and calibration of the pure rate of time preference and elasticity of
//! marginal utility to a near-term rate and a far-horizon rate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::log_mean_exp;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RamseyParams {
    pub rho: f64,
    pub eta: f64,
    /// Substitutability parameter between market and nonmarket goods.
    pub alpha: f64,
}

impl Default for RamseyParams {
    fn default() -> Self {
        Self { rho: 0.0041, eta: 1.02, alpha: 0.0 }
    }
}

/// Growth of market consumption split into the exogenous path and the drags
/// from market and nonmarket damages.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthDecomposition {
    pub g0: f64,
    pub dg_c: f64,
    pub dg_e: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RateMode {
    /// Two goods with finite substitutability `alpha`.
    B10,
    /// Nonmarket damages netted into consumption growth; `alpha = eta / (eta - 1)` implied.
    B12,
    /// Only market damages netted.
    B13,
}

pub fn ramsey_rate(g: f64, p: &RamseyParams) -> f64 {
    p.rho + p.eta * g
}

pub fn two_good_rate(d: &GrowthDecomposition, p: &RamseyParams, mode: RateMode) -> Result<f64> {
    Ok(match mode {
        RateMode::B10 => p.rho + p.eta * (d.g0 - d.dg_c) + p.alpha * (p.eta - 1.0) * (-d.dg_e),
        RateMode::B12 => {
            if p.eta == 1.0 {
                return Err(Error::Domain("netting nonmarket damages into growth needs eta != 1".into()));
            }
            p.rho + p.eta * (d.g0 - d.dg_c - d.dg_e)
        }
        RateMode::B13 => p.rho + p.eta * (d.g0 - d.dg_c),
    })
}

/// `DF(t) = exp(-sum_{s<=t} r_s)` for `t = 1..=rates.len()`.
pub fn discount_factors(rates: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    rates
        .iter()
        .map(|r| {
            acc += r;
            (-acc).exp()
        })
        .collect()
}

/// `-ln(mean_i DF_i(t)) / t` from per-path log discount factors.
pub fn ce_rate_from_log_dfs(log_dfs: &[f64], t: usize) -> f64 {
    -log_mean_exp(log_dfs) / t as f64
}

/// Certainty-equivalent rate at horizon `t` (1-based) across paths of annual rates.
pub fn certainty_equivalent_rate(rate_paths: &[Vec<f64>], t: usize) -> Result<f64> {
    if t == 0 || rate_paths.is_empty() || rate_paths.iter().any(|p| p.len() < t) {
        return Err(Error::Argument(format!("certainty-equivalent rate: horizon {t} not covered")));
    }
    let l: Vec<f64> = rate_paths.iter().map(|p| -p[..t].iter().sum::<f64>()).collect();
    Ok(ce_rate_from_log_dfs(&l, t))
}

/// Term structure `R(1..=horizon)`.
pub fn ce_term_structure(growth: &[Vec<f64>], p: &RamseyParams, horizon: usize) -> Result<Vec<f64>> {
    let rates: Vec<Vec<f64>> = growth.iter().map(|g| g.iter().map(|&x| ramsey_rate(x, p)).collect()).collect();
    (1..=horizon).map(|t| certainty_equivalent_rate(&rates, t)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CalibrationTarget {
    /// Mean certainty-equivalent rate over years `1..=near_horizon`.
    pub near_rate: f64,
    pub near_horizon: usize,
    /// Certainty-equivalent rate at `far_horizon`.
    pub far_rate: f64,
    pub far_horizon: usize,
    /// Elasticity used when growth carries no information about it.
    pub fallback_eta: f64,
}

impl Default for CalibrationTarget {
    fn default() -> Self {
        Self { near_rate: 0.02, near_horizon: 10, far_rate: 0.0147, far_horizon: 200, fallback_eta: 1.02 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Calibration {
    pub params: RamseyParams,
    /// True when the growth ensemble cannot identify eta and the fallback was used.
    pub degenerate: bool,
    pub near_residual: f64,
    pub far_residual: f64,
}

struct Cumulated {
    /// cum[i][t-1] = sum of the first t growth values of path i.
    cum: Vec<Vec<f64>>,
}

impl Cumulated {
    fn new(growth: &[Vec<f64>], horizon: usize) -> Self {
        let cum = growth
            .iter()
            .map(|g| {
                let mut a = 0.0;
                g[..horizon].iter().map(|x| {
                    a += x;
                    a
                }).collect()
            })
            .collect();
        Self { cum }
    }

    /// Certainty-equivalent rate at horizon `t` with `rho = 0`.
    fn q(&self, eta: f64, t: usize) -> f64 {
        let l: Vec<f64> = self.cum.iter().map(|c| -eta * c[t - 1]).collect();
        ce_rate_from_log_dfs(&l, t)
    }

    fn near(&self, eta: f64, n: usize) -> f64 {
        (1..=n).map(|t| self.q(eta, t)).sum::<f64>() / n as f64
    }
}

/// Finds `(rho, eta)` such that the near-term mean certainty-equivalent rate
/// and the far-horizon rate hit their targets.
///
/// `rho` enters every rate additively, so the far-minus-near spread depends
/// on `eta` alone: bracket and bisect it, then solve `rho` directly.
pub fn calibrate(growth: &[Vec<f64>], target: &CalibrationTarget) -> Result<Calibration> {
    let (nh, fh) = (target.near_horizon, target.far_horizon);
    if nh == 0 || fh == 0 {
        return Err(Error::Calibration("horizons must be positive".into()));
    }
    let need = nh.max(fh);
    if growth.is_empty() || growth.iter().any(|g| g.len() < need) {
        return Err(Error::Calibration(format!("growth paths must cover {need} years")));
    }
    let c = Cumulated::new(growth, need);
    let spread = |eta: f64| c.q(eta, fh) - c.near(eta, nh);
    let want = target.far_rate - target.near_rate;
    let finish = |eta: f64, degenerate: bool| {
        let rho = target.near_rate - c.near(eta, nh);
        let params = RamseyParams { rho, eta, alpha: 0.0 };
        Calibration {
            params,
            degenerate,
            near_residual: rho + c.near(eta, nh) - target.near_rate,
            far_residual: rho + c.q(eta, fh) - target.far_rate,
        }
    };

    let grid: Vec<f64> = (0..=500).map(|k| 0.01 * f64::from(k)).collect();
    let vals: Vec<f64> = grid.iter().map(|&e| spread(e) - want).collect();
    let (lo, hi) = vals.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |a, &v| (a.0.min(v), a.1.max(v)));
    if hi - lo < 1e-12 {
        return Ok(finish(target.fallback_eta, true));
    }
    let k = vals
        .windows(2)
        .position(|w| w[0] == 0.0 || w[0].signum() != w[1].signum())
        .ok_or_else(|| Error::Calibration(format!("far rate {} unreachable for eta in [0, 5]", target.far_rate)))?;
    let (mut a, mut b) = (grid[k], grid[k + 1]);
    let mut fa = vals[k];
    if fa == 0.0 {
        return Ok(finish(a, false));
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        let fm = spread(m) - want;
        if fm == 0.0 || (b - a) < 1e-15 {
            a = m;
            break;
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    let cal = finish(0.5 * (a + b), false);
    if cal.near_residual.abs() > 1e-8 || cal.far_residual.abs() > 1e-8 {
        return Err(Error::Calibration(format!(
            "residuals {:.3e}, {:.3e} exceed tolerance",
            cal.near_residual, cal.far_residual
        )));
    }
    Ok(cal)
}

/// Marginal willingness to pay for the nonmarket good, `alpha * c / e`.
pub fn mwtp_nonmarket(alpha: f64, c: f64, e: f64) -> Result<f64> {
    if !(e > 0.0) {
        return Err(Error::Domain(format!("nonmarket good stock must be positive, got {e}")));
    }
    Ok(alpha * c / e)
}
