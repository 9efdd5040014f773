//! Nonmarket damages: temperature mortality, wildfire smoke mortality and
//! biodiversity, monetized with an income-elastic value of a statistical life.

use serde::{Deserialize, Serialize};

use crate::dist::DistSpec;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VslParams {
    /// Value of a statistical life at base income, 2020 USD.
    pub base_vsl: f64,
    /// Per-capita income at which `base_vsl` applies; zero means the trial's first-year income.
    pub base_income: f64,
    pub elasticity: f64,
}

impl Default for VslParams {
    fn default() -> Self {
        Self { base_vsl: 10.05e6, base_income: 0.0, elasticity: 1.0 }
    }
}

pub fn vsl_at(income: f64, base_income: f64, p: &VslParams) -> f64 {
    p.base_vsl * (income / base_income).powf(p.elasticity)
}

/// Excess deaths per capita as a piecewise-linear function of the U.S.
/// temperature anomaly, linearly extrapolated beyond the end knots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MortalityResponse {
    pub knots: Vec<[f64; 2]>,
}

impl Default for MortalityResponse {
    fn default() -> Self {
        Self { knots: vec![[-2.0, -1.3e-4], [0.0, 0.0], [3.0, 2.0e-4], [6.0, 4.3e-4], [10.0, 7.5e-4]] }
    }
}

impl MortalityResponse {
    pub fn rate(&self, anomaly: f64) -> f64 {
        let k = &self.knots;
        let seg = k.windows(2).position(|w| anomaly <= w[1][0]).unwrap_or(k.len() - 2);
        let (a, b) = (k[seg], k[seg + 1]);
        a[1] + (b[1] - a[1]) * (anomaly - a[0]) / (b[0] - a[0])
    }

    pub fn validate(&self) -> Vec<String> {
        let k = &self.knots;
        let mut e = Vec::new();
        if k.len() < 2 || k.windows(2).any(|w| w[1][0] <= w[0][0]) {
            e.push("nonmarket.mortality.knots: need two or more knots with increasing anomaly".into());
        } else if self.rate(0.0).abs() > 1e-15 {
            e.push("nonmarket.mortality.knots: response must vanish at zero anomaly".into());
        }
        e
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WildfirePopulation {
    /// Scale deaths with the trial's population path.
    Scenario,
    /// Hold population at `fixed_population`.
    Fixed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WildfireParams {
    /// Excess deaths per capita per degree of GMST above the baseline.
    pub slope: DistSpec,
    /// Mortality rate per person over the baseline window; excess is measured above it.
    pub baseline_rate: f64,
    pub baseline_anomaly: f64,
    /// The rate is held at its value in this year afterwards.
    pub freeze_year: i32,
    pub population: WildfirePopulation,
    pub fixed_population: f64,
}

impl Default for WildfireParams {
    fn default() -> Self {
        Self {
            slope: DistSpec::new("triangular", &[2.70e-5, 4.03e-5, 5.36e-5]),
            baseline_rate: 6.74e-5,
            baseline_anomaly: 1.16,
            freeze_year: 2055,
            population: WildfirePopulation::Scenario,
            fixed_population: 351_764_939.0,
        }
    }
}

/// Wildfire excess deaths per year of `gmst` (which starts at `start_year`).
pub fn wildfire_deaths(gmst: &[f64], pop: &[f64], start_year: i32, slope: f64, p: &WildfireParams) -> Vec<f64> {
    let freeze = (p.freeze_year - start_year).clamp(0, gmst.len() as i32 - 1) as usize;
    let rate = |i: usize| slope * (gmst[i.min(freeze)] - p.baseline_anomaly).max(0.0);
    (0..gmst.len())
        .map(|i| {
            let n = match p.population {
                WildfirePopulation::Scenario => pop[i],
                WildfirePopulation::Fixed => p.fixed_population,
            };
            rate(i) * n
        })
        .collect()
}

/// Saturating share of species lost as a function of GMST above a baseline,
/// valued through a per-capita willingness to pay that scales with income.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BiodiversityParams {
    pub baseline_anomaly: f64,
    pub max_loss: f64,
    /// Warming at which half of `max_loss` is reached.
    pub half_warming: f64,
    /// Per-capita willingness to pay for the whole species stock at base income, 2020 USD.
    pub wtp: f64,
    pub income_elasticity: f64,
}

impl Default for BiodiversityParams {
    fn default() -> Self {
        Self { baseline_anomaly: 0.0, max_loss: 0.3, half_warming: 2.0, wtp: 1500.0, income_elasticity: 1.0 }
    }
}

pub fn species_loss(gmst: f64, p: &BiodiversityParams) -> f64 {
    let x = (gmst - p.baseline_anomaly).max(0.0);
    p.max_loss * x * x / (p.half_warming * p.half_warming + x * x)
}

pub fn biodiversity_damages(gmst: f64, income: f64, base_income: f64, pop: f64, p: &BiodiversityParams) -> f64 {
    pop * p.wtp * (income / base_income).powf(p.income_elasticity) * species_loss(gmst, p)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VslIncome {
    /// Exogenous scenario income.
    Exogenous,
    /// Income net of macroeconomic damages.
    NetOfMacro,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NonmarketConfig {
    pub vsl: VslParams,
    pub mortality: MortalityResponse,
    pub wildfire: WildfireParams,
    pub biodiversity: BiodiversityParams,
}

impl Default for NonmarketConfig {
    fn default() -> Self {
        Self {
            vsl: VslParams::default(),
            mortality: MortalityResponse::default(),
            wildfire: WildfireParams::default(),
            biodiversity: BiodiversityParams::default(),
        }
    }
}

impl NonmarketConfig {
    pub fn validate(&self) -> Vec<String> {
        let mut e = Vec::new();
        if !(self.vsl.base_vsl > 0.0 && self.vsl.base_income >= 0.0 && self.vsl.elasticity.is_finite()) {
            e.push("nonmarket.vsl: base_vsl > 0, base_income >= 0 and finite elasticity required".into());
        }
        e.extend(self.mortality.validate());
        e.extend(self.wildfire.slope.check("nonmarket.wildfire.slope"));
        if !(self.wildfire.baseline_rate >= 0.0) {
            e.push("nonmarket.wildfire.baseline_rate must be non-negative".into());
        }
        if self.wildfire.fixed_population <= 0.0 {
            e.push("nonmarket.wildfire.fixed_population must be positive".into());
        }
        let b = &self.biodiversity;
        if !(b.max_loss >= 0.0 && b.max_loss <= 1.0 && b.half_warming > 0.0 && b.wtp >= 0.0) {
            e.push("nonmarket.biodiversity: need 0 <= max_loss <= 1, half_warming > 0, wtp >= 0".into());
        }
        e
    }
}

/// No-intercept pinball-loss slope of `y` on `x`.
///
/// The objective is convex and piecewise linear with kinks at `y_i / x_i`;
/// the minimizer is the smallest kink at which the right derivative turns
/// non-negative, which is a weighted quantile of the ratios with weights `|x_i|`.
pub fn fit_quantile_slope(points: &[(f64, f64)], tau: f64) -> Result<f64> {
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::Argument(format!("quantile {tau} outside (0, 1)")));
    }
    if points.len() < 2 {
        return Err(Error::Fit(format!("need at least 2 points, got {}", points.len())));
    }
    if points.iter().any(|p| !(p.0.is_finite() && p.1.is_finite())) {
        return Err(Error::Fit("non-finite point".into()));
    }
    let mut cand: Vec<(f64, f64)> = points.iter().filter(|p| p.0 != 0.0).map(|&(x, y)| (y / x, x.abs())).collect();
    if cand.is_empty() {
        return Err(Error::Fit("all regressors are zero".into()));
    }
    cand.sort_by(|a, b| a.0.total_cmp(&b.0));
    let pos: f64 = points.iter().filter(|p| p.0 > 0.0).map(|p| p.0).sum();
    let neg: f64 = points.iter().filter(|p| p.0 < 0.0).map(|p| -p.0).sum();
    let target = tau * pos + (1.0 - tau) * neg;
    let tol = 1e-12 * (pos + neg);
    let mut cum = 0.0;
    let mut k = 0;
    while k < cand.len() {
        let r = cand[k].0;
        while k < cand.len() && cand[k].0 == r {
            cum += cand[k].1;
            k += 1;
        }
        if cum >= target - tol {
            return Ok(r);
        }
    }
    Ok(cand[cand.len() - 1].0)
}

/// Synthetic stand-in for the GCM x SSP x epoch wildfire projections:
/// 28 models, three scenarios, three decadal epochs. Each model carries its
/// own mortality sensitivity; national deaths are converted to rates with the
/// fixed population and expressed as excess over the baseline rate, against
/// GMST above the baseline anomaly.
pub fn synth_wildfire_cloud(seed: u64, p: &WildfireParams) -> Vec<(f64, f64)> {
    use rand_distr::{Distribution, Normal};
    // Epoch-mean GMST above pre-industrial for (scenario, epoch), before model spread.
    const WARMING: [[f64; 3]; 3] = [[1.45, 1.58, 1.66], [1.50, 1.70, 1.88], [1.52, 1.76, 2.02]];
    let mut out = Vec::with_capacity(252);
    for gcm in 0..28u64 {
        let mut r = crate::rng::stream(seed, gcm, "wildfire-cloud");
        let warm = Normal::new(1.0, 0.12).expect("valid").sample(&mut r);
        let slope = Normal::new(4.03e-5, 1.95e-5).expect("valid").sample(&mut r);
        let noise = Normal::new(0.0, 2.0e-6).expect("valid");
        for row in WARMING {
            for w in row {
                let x = w * warm - p.baseline_anomaly;
                let deaths = (p.baseline_rate + slope * x + noise.sample(&mut r)) * p.fixed_population;
                out.push((x, deaths / p.fixed_population - p.baseline_rate));
            }
        }
    }
    out
}

pub fn slope_pinball(points: &[(f64, f64)], b: f64, tau: f64) -> f64 {
    points
        .iter()
        .map(|&(x, y)| {
            let r = y - b * x;
            if r >= 0.0 {
                tau * r
            } else {
                (tau - 1.0) * r
            }
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wildfire_check_value() {
        let p = WildfireParams { population: WildfirePopulation::Fixed, ..Default::default() };
        let d = wildfire_deaths(&[2.16], &[1.0], 2030, 4.03e-5, &p);
        assert_eq!(d[0].round(), 14_176.0);
    }

    #[test]
    fn wildfire_rate_freezes() {
        let p = WildfireParams::default();
        let g: Vec<f64> = (0..100).map(|i| 1.16 + 0.01 * f64::from(i)).collect();
        let pop = vec![1.0; 100];
        let d = wildfire_deaths(&g, &pop, 2020, 1.0, &p);
        assert!((d[35] - 0.35).abs() < 1e-12);
        assert_eq!(d[35], d[99]);
        assert!(d[34] < d[35]);
    }

    #[test]
    fn vsl_is_unit_elastic_by_default() {
        let p = VslParams::default();
        assert_eq!(vsl_at(2.0, 1.0, &p), 2.0 * 10.05e6);
    }

    #[test]
    fn zero_anomaly_means_zero_nonmarket_damage() {
        assert_eq!(MortalityResponse::default().rate(0.0), 0.0);
        let b = BiodiversityParams::default();
        assert_eq!(biodiversity_damages(0.0, 1.0, 1.0, 3e8, &b), 0.0);
        let w = WildfireParams::default();
        assert_eq!(wildfire_deaths(&[1.16], &[3e8], 2020, 4e-5, &w)[0], 0.0);
    }

    #[test]
    fn quantile_slope_simple_cases() {
        let pts = [(1.0, 1.0), (1.0, 2.0), (1.0, 3.0)];
        assert_eq!(fit_quantile_slope(&pts, 0.5).unwrap(), 2.0);
        // Even count: flat between 1 and 2, smaller slope wins.
        let pts = [(1.0, 1.0), (1.0, 2.0)];
        assert_eq!(fit_quantile_slope(&pts, 0.5).unwrap(), 1.0);
        assert!(fit_quantile_slope(&[(1.0, 1.0)], 0.5).is_err());
    }
}
