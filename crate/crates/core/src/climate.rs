//! Reduced-complexity climate emulator.
//!
//! Four-pool linear carbon cycle, logarithmic CO2 forcing, linear CH4 and N2O
//! forcing from first-order concentration decay, and a two-box energy balance
//! stepped annually. A historical warm-up (default 1850 onwards) precedes the
//! projection so baseline-window statistics are available.

use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dist::DistSpec;
use crate::error::{Error, Result};
use crate::rng;
use crate::scenario::{Knots, TrialScenario};

/// Default number of parameter sets in the climate ensemble.
pub const DEFAULT_ENSEMBLE_SIZE: usize = 2237;

const GTC_PER_GTCO2: f64 = 12.0 / 44.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gas {
    Co2,
    Ch4,
    N2o,
}

impl Gas {
    pub const ALL: [Gas; 3] = [Gas::Co2, Gas::Ch4, Gas::N2o];

    pub fn as_str(self) -> &'static str {
        match self {
            Gas::Co2 => "co2",
            Gas::Ch4 => "ch4",
            Gas::N2o => "n2o",
        }
    }

    /// Metric tons per unit of the emission series (Gt for CO2, Mt otherwise).
    pub fn tons_per_unit(self) -> f64 {
        match self {
            Gas::Co2 => 1e9,
            Gas::Ch4 | Gas::N2o => 1e6,
        }
    }
}

impl std::fmt::Display for Gas {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Gas {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "co2" => Ok(Gas::Co2),
            "ch4" => Ok(Gas::Ch4),
            "n2o" => Ok(Gas::N2o),
            _ => Err(Error::Argument(format!("unknown gas `{s}` (co2, ch4, n2o)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClimateParamSet {
    pub id: u32,
    /// Forcing from doubled CO2, W/m2.
    pub f2x: f64,
    /// Climate feedback parameter, W/m2/K.
    pub tf: f64,
    /// Upper and deep heat capacities, W yr/m2/K.
    pub cap1: f64,
    pub cap2: f64,
    /// Upper-to-deep heat exchange coefficient, W/m2/K.
    pub ox: f64,
    /// Carbon pool fractions.
    pub a: [f64; 4],
    /// Carbon pool timescales in years; `inf` allowed.
    pub tau: [f64; 4],
    /// CH4 and N2O radiative efficiency, W/m2/ppb.
    pub ch4_eff: f64,
    pub n2o_eff: f64,
    /// CH4 and N2O perturbation lifetimes, years.
    pub ch4_tau: f64,
    pub n2o_tau: f64,
}

impl Default for ClimateParamSet {
    fn default() -> Self {
        Self {
            id: 0,
            f2x: 3.9,
            tf: 1.25,
            cap1: 8.0,
            cap2: 50.0,
            ox: 0.7,
            a: [0.2173, 0.2240, 0.2824, 0.2763],
            tau: [f64::INFINITY, 140.0, 13.0, 1.6],
            ch4_eff: 4.5e-4,
            n2o_eff: 3.6e-3,
            ch4_tau: 11.8,
            n2o_tau: 109.0,
        }
    }
}

impl ClimateParamSet {
    pub fn validate(&self) -> Result<()> {
        let id = self.id;
        let fail = |m: String| Err(Error::Validation(format!("climate param set {id}: {m}")));
        let s: f64 = self.a.iter().sum();
        if (s - 1.0).abs() > 1e-12 || self.a.iter().any(|&a| !(a >= 0.0)) {
            return fail(format!("pool fractions must be non-negative and sum to 1 (sum {s})"));
        }
        for &t in self.tau.iter().chain([self.ch4_tau, self.n2o_tau].iter()) {
            if !(t >= 1.0) {
                return fail(format!("timescale {t} below one year breaks annual stepping"));
            }
        }
        for (n, v) in [("f2x", self.f2x), ("tf", self.tf), ("cap1", self.cap1), ("cap2", self.cap2), ("ox", self.ox)] {
            if !(v.is_finite() && v > 0.0) {
                return fail(format!("{n} must be positive"));
            }
        }
        if self.tf + self.ox >= self.cap1 || self.ox >= self.cap2 {
            return fail("heat capacities too small for stable annual stepping".into());
        }
        if !(self.ch4_eff >= 0.0 && self.n2o_eff >= 0.0) {
            return fail("radiative efficiencies must be non-negative".into());
        }
        Ok(())
    }

    /// Equilibrium warming for doubled CO2.
    pub fn ecs(&self) -> f64 {
        self.f2x / self.tf
    }
}

/// Annual emissions of the three gases from `start_year`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmissionPaths {
    pub start_year: i32,
    pub co2: Vec<f64>,
    pub ch4: Vec<f64>,
    pub n2o: Vec<f64>,
}

impl EmissionPaths {
    pub fn from_scenario(s: &TrialScenario) -> Self {
        Self { start_year: s.start_year, co2: s.co2.clone(), ch4: s.ch4.clone(), n2o: s.n2o.clone() }
    }

    pub fn zeros(start_year: i32, len: usize) -> Self {
        Self { start_year, co2: vec![0.0; len], ch4: vec![0.0; len], n2o: vec![0.0; len] }
    }

    pub fn len(&self) -> usize {
        self.co2.len()
    }

    pub fn is_empty(&self) -> bool {
        self.co2.is_empty()
    }

    pub fn end_year(&self) -> i32 {
        self.start_year + self.len() as i32 - 1
    }

    pub fn gas(&self, g: Gas) -> &Vec<f64> {
        match g {
            Gas::Co2 => &self.co2,
            Gas::Ch4 => &self.ch4,
            Gas::N2o => &self.n2o,
        }
    }

    fn gas_mut(&mut self, g: Gas) -> &mut Vec<f64> {
        match g {
            Gas::Co2 => &mut self.co2,
            Gas::Ch4 => &mut self.ch4,
            Gas::N2o => &mut self.n2o,
        }
    }
}

/// Extra emissions added in `year`, in series units (Gt CO2 or Mt).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseSpec {
    pub gas: Gas,
    pub year: i32,
    pub size: f64,
}

pub fn apply_pulse(e: &EmissionPaths, p: &PulseSpec) -> Result<EmissionPaths> {
    if p.year < e.start_year || p.year > e.end_year() {
        return Err(Error::Range { year: p.year, start: e.start_year, end: e.end_year() });
    }
    if !(p.size.is_finite() && p.size != 0.0) {
        return Err(Error::Argument(format!("pulse size must be finite and non-zero, got {}", p.size)));
    }
    let mut out = e.clone();
    out.gas_mut(p.gas)[(p.year - e.start_year) as usize] += p.size;
    Ok(out)
}

/// Pre-projection emissions with exponential approach to their last values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HistoryConfig {
    pub start_year: i32,
    /// Land-use CO2, Gt/yr, constant.
    pub co2_land: f64,
    /// Fossil CO2 in the last historical year, Gt/yr, and its e-folding time.
    pub co2_fossil_last: f64,
    pub co2_efold: f64,
    pub ch4_last: f64,
    pub ch4_efold: f64,
    pub n2o_last: f64,
    pub n2o_efold: f64,
}

impl Default for HistoryConfig {
    fn default() -> Self {
        Self {
            start_year: 1850,
            co2_land: 4.1,
            co2_fossil_last: 36.5,
            co2_efold: 46.6,
            ch4_last: 380.0,
            ch4_efold: 55.0,
            n2o_last: 11.0,
            n2o_efold: 70.0,
        }
    }
}

impl HistoryConfig {
    fn emissions(&self, year: i32, last_year: i32) -> [f64; 3] {
        let d = f64::from(year - last_year);
        [
            self.co2_land + self.co2_fossil_last * (d / self.co2_efold).exp(),
            self.ch4_last * (d / self.ch4_efold).exp(),
            self.n2o_last * (d / self.n2o_efold).exp(),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmulatorConfig {
    /// Pre-industrial CO2, ppm.
    pub co2_preindustrial: f64,
    pub gtc_per_ppm: f64,
    pub ch4_mt_per_ppb: f64,
    pub n2o_mt_per_ppb: f64,
    /// Historical warm-up; `enabled = false` starts from equilibrium at the projection start.
    pub history_enabled: bool,
    pub history: HistoryConfig,
    /// Exogenous forcing from other agents (aerosols, ozone, land albedo), W/m2 by year.
    pub other_forcing: Knots,
}

impl Default for EmulatorConfig {
    fn default() -> Self {
        Self {
            co2_preindustrial: 278.0,
            gtc_per_ppm: 2.124,
            ch4_mt_per_ppb: 2.75,
            n2o_mt_per_ppb: 7.6,
            history_enabled: true,
            history: HistoryConfig::default(),
            other_forcing: Knots(vec![
                (1850.0, 0.0),
                (1950.0, -0.45),
                (1990.0, -0.9),
                (2019.0, -0.81),
                (2050.0, -0.45),
                (2100.0, 0.0),
            ]),
        }
    }
}

impl EmulatorConfig {
    /// Bare physics: no warm-up, no exogenous forcing.
    pub fn bare() -> Self {
        Self { history_enabled: false, other_forcing: Knots(vec![(0.0, 0.0)]), ..Self::default() }
    }

    pub fn validate(&self) -> Vec<String> {
        let mut e = Vec::new();
        for (n, v) in [
            ("co2_preindustrial", self.co2_preindustrial),
            ("gtc_per_ppm", self.gtc_per_ppm),
            ("ch4_mt_per_ppb", self.ch4_mt_per_ppb),
            ("n2o_mt_per_ppb", self.n2o_mt_per_ppb),
        ] {
            if !(v.is_finite() && v > 0.0) {
                e.push(format!("climate.emulator.{n} must be positive"));
            }
        }
        let h = &self.history;
        if self.history_enabled && !(h.co2_efold > 0.0 && h.ch4_efold > 0.0 && h.n2o_efold > 0.0) {
            e.push("climate.emulator.history: e-folding times must be positive".into());
        }
        self.other_forcing.validate("climate.emulator.other_forcing", &mut e);
        e
    }
}

/// Additional emissions returned by a feedback hook.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ExtraEmissions {
    /// Gt CO2.
    pub co2: f64,
    /// Mt CH4.
    pub ch4: f64,
}

/// Called once per simulated year with that year's GMST anomaly; what it returns
/// is added to the following year's emissions.
pub trait FeedbackHook {
    fn step(&mut self, year: i32, gmst: f64) -> ExtraEmissions;
}

pub struct NoFeedback;

impl FeedbackHook for NoFeedback {
    fn step(&mut self, _year: i32, _gmst: f64) -> ExtraEmissions {
        ExtraEmissions::default()
    }
}

/// Annual GMST anomaly relative to pre-industrial, over warm-up plus projection years.
#[derive(Debug, Clone, PartialEq)]
pub struct GmstPath {
    pub start_year: i32,
    pub anomaly: Vec<f64>,
}

impl GmstPath {
    pub fn end_year(&self) -> i32 {
        self.start_year + self.anomaly.len() as i32 - 1
    }

    pub fn at(&self, year: i32) -> Result<f64> {
        if year < self.start_year || year > self.end_year() {
            return Err(Error::Range { year, start: self.start_year, end: self.end_year() });
        }
        Ok(self.anomaly[(year - self.start_year) as usize])
    }

    pub fn window_mean(&self, from: i32, to: i32) -> Result<f64> {
        let s = self.slice(from, to)?;
        Ok(s.iter().sum::<f64>() / s.len() as f64)
    }

    pub fn slice(&self, from: i32, to: i32) -> Result<&[f64]> {
        self.at(from)?;
        self.at(to)?;
        Ok(&self.anomaly[(from - self.start_year) as usize..=(to - self.start_year) as usize])
    }
}

/// Emulator output with the diagnostics used by invariant tests.
#[derive(Debug, Clone, PartialEq)]
pub struct EmulatorTrace {
    pub gmst: GmstPath,
    pub co2_ppm: Vec<f64>,
    pub forcing: Vec<f64>,
    /// Carbon held in the four pools, GtC.
    pub pool_stock: Vec<f64>,
    /// Cumulative pool uptake by sinks, GtC.
    pub uptake_cum: Vec<f64>,
    /// Cumulative CO2 emissions entering the pools, GtC.
    pub emitted_cum: Vec<f64>,
}

pub fn run_emulator(
    e: &EmissionPaths,
    p: &ClimateParamSet,
    cfg: &EmulatorConfig,
    hook: &mut dyn FeedbackHook,
) -> Result<GmstPath> {
    run_emulator_traced(e, p, cfg, hook).map(|t| t.gmst)
}

pub fn run_emulator_traced(
    e: &EmissionPaths,
    p: &ClimateParamSet,
    cfg: &EmulatorConfig,
    hook: &mut dyn FeedbackHook,
) -> Result<EmulatorTrace> {
    let first = if cfg.history_enabled { cfg.history.start_year.min(e.start_year) } else { e.start_year };
    let n = (e.end_year() - first + 1).max(0) as usize;
    let decay: Vec<f64> = p.tau.iter().map(|t| 1.0 - (-1.0 / t).exp()).collect();
    let ch4_keep = (-1.0 / p.ch4_tau).exp();
    let n2o_keep = (-1.0 / p.n2o_tau).exp();
    let co2_scale = p.f2x / std::f64::consts::LN_2;

    let mut pools = [0.0f64; 4];
    let (mut x_ch4, mut x_n2o) = (0.0, 0.0);
    let (mut t1, mut t2) = (0.0f64, 0.0f64);
    let mut pending = ExtraEmissions::default();
    let (mut uptake, mut emitted) = (0.0, 0.0);

    let mut tr = EmulatorTrace {
        gmst: GmstPath { start_year: first, anomaly: Vec::with_capacity(n) },
        co2_ppm: Vec::with_capacity(n),
        forcing: Vec::with_capacity(n),
        pool_stock: Vec::with_capacity(n),
        uptake_cum: Vec::with_capacity(n),
        emitted_cum: Vec::with_capacity(n),
    };
    for k in 0..n {
        let year = first + k as i32;
        let [mut co2, mut ch4, n2o] = if year < e.start_year {
            cfg.history.emissions(year, e.start_year - 1)
        } else {
            let i = (year - e.start_year) as usize;
            [e.co2[i], e.ch4[i], e.n2o[i]]
        };
        co2 += pending.co2;
        ch4 += pending.ch4;

        let gtc = co2 * GTC_PER_GTCO2;
        for j in 0..4 {
            let u = pools[j] * decay[j];
            uptake += u;
            pools[j] += p.a[j] * gtc - u;
        }
        emitted += gtc;
        let stock: f64 = pools.iter().sum();
        let ppm = cfg.co2_preindustrial + stock / cfg.gtc_per_ppm;
        x_ch4 = x_ch4 * ch4_keep + ch4 / cfg.ch4_mt_per_ppb;
        x_n2o = x_n2o * n2o_keep + n2o / cfg.n2o_mt_per_ppb;
        let f = co2_scale * (ppm / cfg.co2_preindustrial).ln()
            + p.ch4_eff * x_ch4
            + p.n2o_eff * x_n2o
            + cfg.other_forcing.at(f64::from(year));

        let dt1 = (f - p.tf * t1 - p.ox * (t1 - t2)) / p.cap1;
        let dt2 = p.ox * (t1 - t2) / p.cap2;
        t1 += dt1;
        t2 += dt2;
        if !(t1.is_finite() && t2.is_finite() && ppm.is_finite() && ppm > 0.0) {
            return Err(Error::Numerical { what: format!("climate emulator (param set {})", p.id), year });
        }
        tr.gmst.anomaly.push(t1);
        tr.co2_ppm.push(ppm);
        tr.forcing.push(f);
        tr.pool_stock.push(stock);
        tr.uptake_cum.push(uptake);
        tr.emitted_cum.push(emitted);
        pending = hook.step(year, t1);
    }
    Ok(tr)
}

/// Central emissions path of a middle-of-the-road reference scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReferencePath {
    pub co2: Knots,
    pub ch4: Knots,
    pub n2o: Knots,
}

impl Default for ReferencePath {
    fn default() -> Self {
        Self {
            co2: Knots(vec![(2020.0, 40.0), (2050.0, 43.0), (2070.0, 37.0), (2100.0, 10.0), (2150.0, 3.0)]),
            ch4: Knots(vec![(2020.0, 380.0), (2050.0, 360.0), (2100.0, 220.0)]),
            n2o: Knots(vec![(2020.0, 11.0), (2100.0, 11.0)]),
        }
    }
}

impl ReferencePath {
    pub fn emissions(&self, start_year: i32, end_year: i32) -> EmissionPaths {
        let ys: Vec<f64> = (start_year..=end_year).map(f64::from).collect();
        EmissionPaths {
            start_year,
            co2: ys.iter().map(|&y| self.co2.at(y)).collect(),
            ch4: ys.iter().map(|&y| self.ch4.at(y)).collect(),
            n2o: ys.iter().map(|&y| self.n2o.at(y)).collect(),
        }
    }
}

/// GMST anomaly in 2100 under the reference path: the warmth ranking used for pairing.
pub fn emergent_warmth(p: &ClimateParamSet, reference: &EmissionPaths, cfg: &EmulatorConfig) -> Result<f64> {
    run_emulator(reference, p, cfg, &mut NoFeedback)?.at(2100)
}

/// Distributions from which the climate ensemble is drawn. `tau_scale`
/// multiplies the three finite pool timescales of the central set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParamDistributions {
    pub f2x: DistSpec,
    pub tf: DistSpec,
    pub cap1: DistSpec,
    pub cap2: DistSpec,
    pub ox: DistSpec,
    pub tau_scale: DistSpec,
    pub ch4_eff: DistSpec,
    pub n2o_eff: DistSpec,
    pub ch4_tau: DistSpec,
    pub n2o_tau: DistSpec,
}

impl Default for ParamDistributions {
    fn default() -> Self {
        let inf = f64::INFINITY;
        Self {
            f2x: DistSpec::new("truncnormal", &[3.9, 0.2, 3.0, 5.0]),
            tf: DistSpec::new("truncnormal", &[1.25, 0.3, 0.6, 2.5]),
            cap1: DistSpec::new("truncnormal", &[8.0, 1.0, 5.0, 12.0]),
            cap2: DistSpec::new("truncnormal", &[50.0, 10.0, 20.0, 100.0]),
            ox: DistSpec::new("truncnormal", &[0.7, 0.12, 0.3, 1.2]),
            tau_scale: DistSpec::new("truncnormal", &[1.0, 0.1, 0.6, 1.6]),
            ch4_eff: DistSpec::new("truncnormal", &[4.5e-4, 5e-5, 0.0, inf]),
            n2o_eff: DistSpec::new("truncnormal", &[3.6e-3, 3e-4, 0.0, inf]),
            ch4_tau: DistSpec::new("truncnormal", &[11.8, 1.2, 6.0, 20.0]),
            n2o_tau: DistSpec::new("truncnormal", &[109.0, 8.0, 60.0, 160.0]),
        }
    }
}

impl ParamDistributions {
    pub fn validate(&self) -> Vec<String> {
        let mut e = Vec::new();
        for (n, d) in self.fields() {
            e.extend(d.check(&format!("climate.params.{n}")));
        }
        e
    }

    fn fields(&self) -> [(&'static str, &DistSpec); 10] {
        [
            ("f2x", &self.f2x),
            ("tf", &self.tf),
            ("cap1", &self.cap1),
            ("cap2", &self.cap2),
            ("ox", &self.ox),
            ("tau_scale", &self.tau_scale),
            ("ch4_eff", &self.ch4_eff),
            ("n2o_eff", &self.n2o_eff),
            ("ch4_tau", &self.ch4_tau),
            ("n2o_tau", &self.n2o_tau),
        ]
    }
}

pub fn sample_param_ensemble(n: usize, seed: u64, d: &ParamDistributions) -> Result<Vec<ClimateParamSet>> {
    let errs = d.validate();
    if !errs.is_empty() {
        return Err(Error::Config(errs));
    }
    let c = ClimateParamSet::default();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut r = rng::stream(seed, i as u64, "climate-params");
        let mut p = ClimateParamSet { id: i as u32, ..c.clone() };
        // Re-draw the rare combinations that would destabilise annual stepping.
        for _ in 0..1000 {
            p.f2x = d.f2x.sample(&mut r);
            p.tf = d.tf.sample(&mut r);
            p.cap1 = d.cap1.sample(&mut r);
            p.cap2 = d.cap2.sample(&mut r);
            p.ox = d.ox.sample(&mut r);
            let s = d.tau_scale.sample(&mut r);
            p.tau = [c.tau[0], (c.tau[1] * s).max(1.0), (c.tau[2] * s).max(1.0), (c.tau[3] * s).max(1.0)];
            p.ch4_eff = d.ch4_eff.sample(&mut r);
            p.n2o_eff = d.n2o_eff.sample(&mut r);
            p.ch4_tau = d.ch4_tau.sample(&mut r).max(1.0);
            p.n2o_tau = d.n2o_tau.sample(&mut r).max(1.0);
            if p.validate().is_ok() {
                break;
            }
        }
        p.validate()?;
        out.push(p);
    }
    Ok(out)
}

/// Picks the parameter-set index for a trial from its own stream.
pub fn draw_param_index(master_seed: u64, trial_id: u64, n_sets: usize) -> usize {
    let mut r = rng::stream(master_seed, trial_id, "climate");
    r.random_range(0..n_sets)
}

const PARAM_COLUMNS: [&str; 18] = [
    "id", "f2x", "tf", "cap1", "cap2", "ox", "a1", "a2", "a3", "a4", "tau1", "tau2", "tau3", "tau4", "ch4_eff",
    "n2o_eff", "ch4_tau", "n2o_tau",
];

pub fn write_params<W: Write>(sets: &[ClimateParamSet], w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(PARAM_COLUMNS)?;
    for p in sets {
        let mut row = vec![p.id.to_string()];
        for v in [p.f2x, p.tf, p.cap1, p.cap2, p.ox]
            .into_iter()
            .chain(p.a)
            .chain(p.tau)
            .chain([p.ch4_eff, p.n2o_eff, p.ch4_tau, p.n2o_tau])
        {
            row.push(v.to_string());
        }
        wtr.write_record(&row)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_params<R: Read>(r: R) -> Result<Vec<ClimateParamSet>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
    let headers = rdr.headers()?.clone();
    let mut idx = [0usize; 18];
    for (k, c) in PARAM_COLUMNS.iter().enumerate() {
        idx[k] = headers.iter().position(|h| h == *c).ok_or_else(|| Error::Schema((*c).to_string()))?;
    }
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let mut v = [0.0f64; 18];
        for k in 0..18 {
            let s = rec.get(idx[k]).unwrap_or("");
            v[k] = s
                .parse()
                .map_err(|_| Error::Validation(format!("climate params: `{}` = `{s}` is not a number", PARAM_COLUMNS[k])))?;
        }
        let p = ClimateParamSet {
            id: v[0] as u32,
            f2x: v[1],
            tf: v[2],
            cap1: v[3],
            cap2: v[4],
            ox: v[5],
            a: [v[6], v[7], v[8], v[9]],
            tau: [v[10], v[11], v[12], v[13]],
            ch4_eff: v[14],
            n2o_eff: v[15],
            ch4_tau: v[16],
            n2o_tau: v[17],
        };
        p.validate()?;
        out.push(p);
    }
    Ok(out)
}

pub fn load_params(path: &Path) -> Result<Vec<ClimateParamSet>> {
    read_params(std::fs::File::open(path)?)
}
