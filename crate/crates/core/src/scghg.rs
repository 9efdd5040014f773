//! Monte Carlo estimation of the U.S. social cost of a greenhouse gas.
//!
//! Each trial draws a scenario, a climate parameter set (with its paired GCM
//! pattern), feedback states and nonmarket parameters from streams keyed by
//! the trial id. Baseline and pulse runs share every draw; the per-ton
//! present value at the pulse year of the damage difference is averaged
//! across trials.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::climate::{
    apply_pulse, draw_param_index, emergent_warmth, run_emulator, sample_param_ensemble, ClimateParamSet,
    EmissionPaths, EmulatorConfig, Gas, GmstPath, ParamDistributions, PulseSpec, ReferencePath,
};
use crate::damages_macro::{run_damage, MacroSpec, Study};
use crate::damages_nonmarket::{
    biodiversity_damages, vsl_at, wildfire_deaths, NonmarketConfig, VslIncome,
};
use crate::discounting::{RamseyParams, RateMode};
use crate::error::{Error, Result};
use crate::feedbacks::{sample_feedback_states, CarbonFeedbacks, FeedbackConfig};
use crate::patterns::{build_pairing, downscale, rank_gcms, GcmPattern, PairingTable, PatternConfig, UsTempPath};
use crate::rng;
use crate::scenario::{synth_ensemble, ScenarioEnsemble, SynthTargets, TrialScenario};
use crate::stats;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Sources valued separately; discounting nets market damages only.
    Independent,
    /// VSL on income net of market damages; discounting nets all damages.
    Integrated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NonmarketToggles {
    pub mortality: bool,
    pub wildfire: bool,
    pub biodiversity: bool,
}

impl NonmarketToggles {
    pub fn all() -> Self {
        Self { mortality: true, wildfire: true, biodiversity: true }
    }

    pub fn any(&self) -> bool {
        self.mortality || self.wildfire || self.biodiversity
    }

    /// Parses a comma list of `mortality,wildfire,biodiversity`, or `all` / `none`.
    pub fn parse(s: &str) -> Result<Self> {
        let mut t = Self::default();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            match part {
                "all" => t = Self::all(),
                "none" => t = Self::default(),
                "mortality" => t.mortality = true,
                "wildfire" => t.wildfire = true,
                "biodiversity" => t.biodiversity = true,
                other => return Err(Error::Argument(format!("unknown nonmarket source `{other}`"))),
            }
        }
        Ok(t)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub gas: Gas,
    pub pulse_year: i32,
    /// Pulse in series units (Gt CO2, Mt CH4, Mt N2O); zero selects the gas default.
    pub pulse_size: f64,
    pub trials: usize,
    pub seed: u64,
    /// Market damage sources; each produces its own row.
    pub studies: Vec<Study>,
    pub nonmarket: NonmarketToggles,
    pub mode: Mode,
    /// Overrides of the mode presets.
    pub vsl_income: Option<VslIncome>,
    pub rate_mode: Option<RateMode>,
    pub discount: RamseyParams,
    pub quantiles: Vec<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            gas: Gas::Co2,
            pulse_year: 2030,
            pulse_size: 0.0,
            trials: 10_000,
            seed: 20_240_101,
            studies: vec![Study::Burke],
            nonmarket: NonmarketToggles::all(),
            mode: Mode::Independent,
            vsl_income: None,
            rate_mode: None,
            discount: RamseyParams::default(),
            quantiles: vec![0.05, 0.5, 0.95],
        }
    }
}

pub fn default_pulse_size(g: Gas) -> f64 {
    match g {
        Gas::Co2 => 1.0,
        Gas::Ch4 => 10.0,
        Gas::N2o => 1.0,
    }
}

impl RunConfig {
    pub fn pulse(&self) -> PulseSpec {
        let size = if self.pulse_size == 0.0 { default_pulse_size(self.gas) } else { self.pulse_size };
        PulseSpec { gas: self.gas, year: self.pulse_year, size }
    }

    pub fn vsl_income_mode(&self) -> VslIncome {
        self.vsl_income.unwrap_or(match self.mode {
            Mode::Independent => VslIncome::Exogenous,
            Mode::Integrated => VslIncome::NetOfMacro,
        })
    }

    pub fn discount_mode(&self) -> RateMode {
        self.rate_mode.unwrap_or(match self.mode {
            Mode::Independent => RateMode::B13,
            Mode::Integrated => RateMode::B12,
        })
    }

    pub fn validate(&self) -> Vec<String> {
        let mut e = Vec::new();
        if self.trials == 0 {
            e.push("run.trials must be positive".into());
        }
        if !self.pulse_size.is_finite() || self.pulse_size < 0.0 {
            e.push("run.pulse_size must be non-negative (0 = gas default)".into());
        }
        if !(self.discount.rho.is_finite() && self.discount.eta.is_finite()) {
            e.push("discounting: rho and eta must be finite".into());
        }
        match self.discount_mode() {
            RateMode::B12 if self.discount.eta == 1.0 => {
                e.push("discounting: rate mode b12 requires eta != 1".into())
            }
            RateMode::B10 => e.push("discounting: rate mode b10 is for term-structure analysis, not runs".into()),
            _ => {}
        }
        if self.quantiles.iter().any(|q| !(0.0..=1.0).contains(q)) {
            e.push("run.quantiles must lie in [0, 1]".into());
        }
        let mut s = self.studies.clone();
        s.sort();
        s.dedup();
        if s.len() != self.studies.len() {
            e.push("run.studies lists a study twice".into());
        }
        e
    }
}

/// Inputs shared by every trial of a run.
#[derive(Debug, Clone)]
pub struct SharedInputs {
    pub scenarios: ScenarioEnsemble,
    pub params: Vec<ClimateParamSet>,
    pub pairing: PairingTable,
    pub patterns: PatternConfig,
    pub emulator: EmulatorConfig,
    pub feedbacks: FeedbackConfig,
    pub payloads: Vec<MacroSpec>,
    pub nonmarket: NonmarketConfig,
}

/// Knobs used to build [`SharedInputs`] without external files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSetup {
    pub scenario: SynthTargets,
    pub emulator: EmulatorConfig,
    pub param_distributions: ParamDistributions,
    pub ensemble_size: usize,
    pub reference: ReferencePath,
    pub patterns: PatternConfig,
    pub feedbacks: FeedbackConfig,
    pub nonmarket: NonmarketConfig,
}

impl Default for ModelSetup {
    fn default() -> Self {
        Self {
            scenario: SynthTargets::default(),
            emulator: EmulatorConfig::default(),
            param_distributions: ParamDistributions::default(),
            ensemble_size: crate::climate::DEFAULT_ENSEMBLE_SIZE,
            reference: ReferencePath::default(),
            patterns: PatternConfig::default(),
            feedbacks: FeedbackConfig::default(),
            nonmarket: NonmarketConfig::default(),
        }
    }
}

/// Ranks parameter sets by warmth under the reference path and pairs them with GCMs.
pub fn pair_params(
    params: &[ClimateParamSet],
    reference: &ReferencePath,
    emulator: &EmulatorConfig,
    patterns: &PatternConfig,
) -> Result<PairingTable> {
    let r = reference.emissions(crate::scenario::START_YEAR, 2100);
    let warmth: Vec<Result<(u32, f64)>> =
        crate::par::map_indexed(params.len(), |i| Ok((params[i].id, emergent_warmth(&params[i], &r, emulator)?)));
    let warmth: Vec<(u32, f64)> = warmth.into_iter().collect::<Result<_>>()?;
    build_pairing(&warmth, &rank_gcms(&patterns.gcms, patterns.mean_tcr, patterns.mean_ecs))
}

impl SharedInputs {
    /// Synthesizes scenarios and the climate ensemble from `setup`.
    pub fn build(setup: &ModelSetup, trials: usize, seed: u64, payloads: Vec<MacroSpec>) -> Result<Self> {
        let scenarios = synth_ensemble(trials, seed, &setup.scenario)?;
        let params = sample_param_ensemble(setup.ensemble_size, seed, &setup.param_distributions)?;
        Self::assemble(setup, scenarios, params, None, payloads)
    }

    /// Assembles inputs from explicit parts; computes the pairing when absent.
    pub fn assemble(
        setup: &ModelSetup,
        scenarios: ScenarioEnsemble,
        params: Vec<ClimateParamSet>,
        pairing: Option<PairingTable>,
        payloads: Vec<MacroSpec>,
    ) -> Result<Self> {
        if params.is_empty() {
            return Err(Error::config("climate ensemble is empty"));
        }
        let pairing = match pairing {
            Some(p) => p,
            None => pair_params(&params, &setup.reference, &setup.emulator, &setup.patterns)?,
        };
        for p in &params {
            let g = pairing
                .gcm_of(p.id)
                .ok_or_else(|| Error::Validation(format!("param set {} has no paired GCM", p.id)))?;
            if !setup.patterns.gcms.iter().any(|x| x.name == g) {
                return Err(Error::Validation(format!("pairing names unknown GCM `{g}`")));
            }
        }
        Ok(Self {
            scenarios,
            params,
            pairing,
            patterns: setup.patterns.clone(),
            emulator: setup.emulator.clone(),
            feedbacks: setup.feedbacks.clone(),
            payloads,
            nonmarket: setup.nonmarket.clone(),
        })
    }

    pub fn payload(&self, s: Study) -> Result<&MacroSpec> {
        self.payloads
            .iter()
            .find(|p| p.study == s)
            .ok_or_else(|| Error::config(format!("no damage payload for study {s}")))
    }

    fn gcm(&self, param_id: u32) -> &GcmPattern {
        let name = self.pairing.gcm_of(param_id).expect("pairing checked at assembly");
        self.patterns.gcms.iter().find(|g| g.name == name).expect("gcm checked at assembly")
    }
}

/// Climate draws of one trial.
pub struct TrialClimate<'a> {
    pub scenario: &'a TrialScenario,
    pub param: &'a ClimateParamSet,
    pub gcm: &'a GcmPattern,
    pub gmst: GmstPath,
    pub us: UsTempPath,
}

/// Baseline climate of trial `i` (no pulse).
pub fn trial_climate<'a>(sh: &'a SharedInputs, seed: u64, i: usize) -> Result<TrialClimate<'a>> {
    climate_for(sh, seed, i, None)
}

fn climate_for<'a>(sh: &'a SharedInputs, seed: u64, i: usize, pulse: Option<&PulseSpec>) -> Result<TrialClimate<'a>> {
    let scenario = sh
        .scenarios
        .trials
        .get(i)
        .ok_or_else(|| Error::config(format!("trial {i} exceeds the scenario ensemble ({})", sh.scenarios.len())))?;
    let param = &sh.params[draw_param_index(seed, i as u64, sh.params.len())];
    let gcm = sh.gcm(param.id);
    let mut em = EmissionPaths::from_scenario(scenario);
    if let Some(p) = pulse {
        em = apply_pulse(&em, p)?;
    }
    let states = sample_feedback_states(seed, i as u64, &sh.feedbacks);
    let mut hook = CarbonFeedbacks::new(states, &sh.feedbacks);
    let gmst = run_emulator(&em, param, &sh.emulator, &mut hook)?;
    let us = downscale(&gmst, gcm, &sh.patterns)?;
    Ok(TrialClimate { scenario, param, gcm, gmst, us })
}

/// Per-ton present values for one source row of one trial, 2020 USD.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SourceValues {
    pub market: f64,
    pub mortality: f64,
    pub wildfire: f64,
    pub biodiversity: f64,
}

impl SourceValues {
    pub fn nonmarket(&self) -> f64 {
        self.mortality + self.wildfire + self.biodiversity
    }

    pub fn total(&self) -> f64 {
        self.market + self.nonmarket()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub trial: usize,
    pub param_id: u32,
    pub gcm: String,
    pub gmst_2100: f64,
    pub us_2100: f64,
    /// Baseline market loss fraction in 2100 per source row.
    pub loss_2100: Vec<f64>,
    pub values: Vec<SourceValues>,
}

/// Damage streams of one climate realisation, in 2020 USD per year.
struct Streams {
    market: Vec<f64>,
    mortality: Vec<f64>,
    wildfire: Vec<f64>,
    biodiversity: Vec<f64>,
    /// Per-capita consumption used for discounting.
    consumption: Vec<f64>,
    loss_2100: f64,
}

struct TrialDraws {
    wildfire_slope: f64,
}

fn draws(sh: &SharedInputs, seed: u64, i: usize) -> TrialDraws {
    let mut r = rng::stream(seed, i as u64, "wildfire");
    TrialDraws { wildfire_slope: sh.nonmarket.wildfire.slope.sample(&mut r) }
}

fn streams(
    sh: &SharedInputs,
    cfg: &RunConfig,
    c: &TrialClimate,
    spec: Option<&MacroSpec>,
    d: &TrialDraws,
) -> Result<Streams> {
    let s = c.scenario;
    let n = s.len();
    let start = s.start_year;
    let loss: Vec<f64> = match spec {
        Some(sp) => run_damage(sp, &c.us, start, n)?.losses(),
        None => vec![0.0; n],
    };
    let gmst = c.gmst.slice(start, s.end_year())?;
    let us = c.us.level[(start - c.us.start_year) as usize..][..n].to_vec();
    let nm = &sh.nonmarket;
    let on = cfg.nonmarket;
    let base_income = if nm.vsl.base_income > 0.0 { nm.vsl.base_income } else { s.pc_gdp(0) };
    let income: Vec<f64> = (0..n)
        .map(|i| match cfg.vsl_income_mode() {
            VslIncome::Exogenous => s.pc_gdp(i),
            VslIncome::NetOfMacro => s.pc_gdp(i) * (1.0 - loss[i]),
        })
        .collect();
    let vsl: Vec<f64> = income.iter().map(|&y| vsl_at(y, base_income, &nm.vsl)).collect();
    let market: Vec<f64> = (0..n).map(|i| loss[i] * s.gdp[i]).collect();
    let mortality: Vec<f64> = if on.mortality {
        let t_base = sh.patterns.us_baseline;
        (0..n).map(|i| nm.mortality.rate(us[i] - t_base) * s.pop[i] * vsl[i]).collect()
    } else {
        vec![0.0; n]
    };
    let wildfire: Vec<f64> = if on.wildfire {
        wildfire_deaths(gmst, &s.pop, start, d.wildfire_slope, &nm.wildfire)
            .into_iter()
            .zip(&vsl)
            .map(|(deaths, v)| deaths * v)
            .collect()
    } else {
        vec![0.0; n]
    };
    let biodiversity: Vec<f64> = if on.biodiversity {
        (0..n)
            .map(|i| biodiversity_damages(gmst[i], income[i], base_income, s.pop[i], &nm.biodiversity))
            .collect()
    } else {
        vec![0.0; n]
    };
    let consumption: Vec<f64> = (0..n)
        .map(|i| {
            let market_c = s.pc_gdp(i) * (1.0 - loss[i]);
            match cfg.discount_mode() {
                RateMode::B12 => market_c - (mortality[i] + wildfire[i] + biodiversity[i]) / s.pop[i],
                _ => market_c,
            }
        })
        .collect();
    if let Some(k) = consumption.iter().position(|c| !(c.is_finite() && *c > 0.0)) {
        return Err(Error::Numerical { what: "net consumption".into(), year: start + k as i32 });
    }
    let loss_2100 = s.index_of(2100).map(|k| loss[k]).unwrap_or(f64::NAN);
    Ok(Streams { market, mortality, wildfire, biodiversity, consumption, loss_2100 })
}

/// Discount factors relative to the pulse year for years `pulse..=end`.
fn pulse_discount(cons: &[f64], k0: usize, p: &RamseyParams) -> Vec<f64> {
    let mut acc = 0.0;
    let mut out = Vec::with_capacity(cons.len() - k0);
    out.push(1.0);
    for k in k0 + 1..cons.len() {
        acc += p.rho + p.eta * (cons[k] / cons[k - 1] - 1.0);
        out.push((-acc).exp());
    }
    out
}

fn pv(df: &[f64], k0: usize, base: &[f64], pulse: &[f64]) -> f64 {
    df.iter().enumerate().map(|(j, d)| d * (pulse[k0 + j] - base[k0 + j])).sum()
}

fn source_rows(cfg: &RunConfig) -> Vec<Option<Study>> {
    if cfg.studies.is_empty() {
        vec![None]
    } else {
        cfg.studies.iter().copied().map(Some).collect()
    }
}

pub fn source_label(s: Option<Study>) -> String {
    s.map_or_else(|| "none".to_string(), |x| x.as_str().to_string())
}

fn values_between(
    sh: &SharedInputs,
    cfg: &RunConfig,
    base: &TrialClimate,
    pulse: &TrialClimate,
    d_base: &TrialDraws,
    d_pulse: &TrialDraws,
) -> Result<(Vec<SourceValues>, Vec<f64>)> {
    let p = cfg.pulse();
    let k0 = base.scenario.index_of(p.year)?;
    let per_ton = 1.0 / (p.size * p.gas.tons_per_unit());
    let mut vals = Vec::new();
    let mut l2100 = Vec::new();
    for row in source_rows(cfg) {
        let spec = row.map(|s| sh.payload(s)).transpose()?;
        let b = streams(sh, cfg, base, spec, d_base)?;
        let q = streams(sh, cfg, pulse, spec, d_pulse)?;
        let df = pulse_discount(&b.consumption, k0, &cfg.discount);
        let v = SourceValues {
            market: pv(&df, k0, &b.market, &q.market) * per_ton,
            mortality: pv(&df, k0, &b.mortality, &q.mortality) * per_ton,
            wildfire: pv(&df, k0, &b.wildfire, &q.wildfire) * per_ton,
            biodiversity: pv(&df, k0, &b.biodiversity, &q.biodiversity) * per_ton,
        };
        if !v.total().is_finite() {
            return Err(Error::Numerical { what: "present value".into(), year: p.year });
        }
        vals.push(v);
        l2100.push(b.loss_2100);
    }
    Ok((vals, l2100))
}

pub fn run_trial(sh: &SharedInputs, cfg: &RunConfig, i: usize) -> Result<TrialRecord> {
    let p = cfg.pulse();
    let base = climate_for(sh, cfg.seed, i, None)?;
    let pulse = climate_for(sh, cfg.seed, i, Some(&p))?;
    let d = draws(sh, cfg.seed, i);
    let (values, loss_2100) = values_between(sh, cfg, &base, &pulse, &d, &d)?;
    Ok(TrialRecord {
        trial: i,
        param_id: base.param.id,
        gcm: base.gcm.name.clone(),
        gmst_2100: base.gmst.at(2100).unwrap_or(f64::NAN),
        us_2100: base.us.at(2100).unwrap_or(f64::NAN),
        loss_2100,
        values,
    })
}

/// Summary of one source row.
#[derive(Debug, Clone, PartialEq)]
pub struct ScghgEstimate {
    pub source: String,
    pub market: f64,
    pub mortality: f64,
    pub wildfire: f64,
    pub biodiversity: f64,
    pub nonmarket: f64,
    pub total: f64,
    pub total_se: f64,
    pub quantiles: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScghgResults {
    pub gas: Gas,
    pub pulse_year: i32,
    pub estimates: Vec<ScghgEstimate>,
    pub trials: Vec<TrialRecord>,
}

impl ScghgResults {
    pub fn estimate(&self, source: &str) -> Option<&ScghgEstimate> {
        self.estimates.iter().find(|e| e.source == source)
    }
}

fn check_run(sh: &SharedInputs, cfg: &RunConfig) -> Result<()> {
    let errs = cfg.validate();
    if !errs.is_empty() {
        return Err(Error::Config(errs));
    }
    if cfg.trials > sh.scenarios.len() {
        return Err(Error::config(format!(
            "run.trials = {} exceeds the scenario ensemble ({})",
            cfg.trials,
            sh.scenarios.len()
        )));
    }
    for s in &cfg.studies {
        sh.payload(*s)?;
    }
    Ok(())
}

pub fn run(sh: &SharedInputs, cfg: &RunConfig) -> Result<ScghgResults> {
    check_run(sh, cfg)?;
    let recs = crate::par::map_indexed(cfg.trials, |i| run_trial(sh, cfg, i));
    let mut trials = Vec::with_capacity(recs.len());
    for (i, r) in recs.into_iter().enumerate() {
        trials.push(r.map_err(|e| Error::Trial { trial: i, source: Box::new(e) })?);
    }
    let estimates = source_rows(cfg)
        .into_iter()
        .enumerate()
        .map(|(k, s)| summarize(source_label(s), trials.iter().map(|t| t.values[k]), &cfg.quantiles))
        .collect();
    Ok(ScghgResults { gas: cfg.gas, pulse_year: cfg.pulse_year, estimates, trials })
}

/// Convenience for single-row runs.
pub fn scghg(sh: &SharedInputs, cfg: &RunConfig) -> Result<ScghgEstimate> {
    let r = run(sh, cfg)?;
    if r.estimates.len() != 1 {
        return Err(Error::Argument("scghg() needs exactly one source row; use run()".into()));
    }
    Ok(r.estimates.into_iter().next().expect("one row"))
}

fn summarize(source: String, vals: impl Iterator<Item = SourceValues>, qs: &[f64]) -> ScghgEstimate {
    let v: Vec<SourceValues> = vals.collect();
    let col = |f: fn(&SourceValues) -> f64| v.iter().map(f).collect::<Vec<f64>>();
    let totals = col(SourceValues::total);
    let mut sorted = totals.clone();
    sorted.sort_by(f64::total_cmp);
    let mortality = stats::mean(&col(|x| x.mortality));
    let wildfire = stats::mean(&col(|x| x.wildfire));
    let biodiversity = stats::mean(&col(|x| x.biodiversity));
    let nonmarket = mortality + wildfire + biodiversity;
    let total = stats::mean(&totals);
    ScghgEstimate {
        source,
        // Residual attribution keeps market + nonmarket == total.
        market: total - nonmarket,
        mortality,
        wildfire,
        biodiversity,
        nonmarket,
        total,
        total_se: stats::std_error(&totals),
        quantiles: qs.iter().map(|&q| (q, stats::quantile_sorted(&sorted, q))).collect(),
    }
}

/// Per-trial totals with the pulse run drawing from trial `i + n` instead of
/// `i`. Only useful as a variance baseline for the paired design.
pub fn run_unpaired(sh: &SharedInputs, cfg: &RunConfig) -> Result<Vec<f64>> {
    check_run(sh, cfg)?;
    let n = cfg.trials;
    if 2 * n > sh.scenarios.len() {
        return Err(Error::config("unpaired comparison needs an ensemble of 2 x trials"));
    }
    let p = cfg.pulse();
    let out = crate::par::map_indexed(n, |i| -> Result<f64> {
        let base = climate_for(sh, cfg.seed, i, None)?;
        let pulse = climate_for(sh, cfg.seed, i + n, Some(&p))?;
        let (v, _) = values_between(sh, cfg, &base, &pulse, &draws(sh, cfg.seed, i), &draws(sh, cfg.seed, i + n))?;
        Ok(v[0].total())
    });
    out.into_iter().collect()
}

/// Mean climate diagnostics over the first `trials` trials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClimateSummary {
    pub gmst_2011_2020: f64,
    pub gmst_2100: f64,
    pub us_2100: f64,
    /// Mean 2100 U.S. warming over the U.S. baseline.
    pub us_delta_2100: f64,
}

pub fn climate_summary(sh: &SharedInputs, seed: u64, trials: usize) -> Result<ClimateSummary> {
    let rows = crate::par::map_indexed(trials, |i| -> Result<[f64; 3]> {
        let c = trial_climate(sh, seed, i)?;
        Ok([c.gmst.window_mean(2011, 2020)?, c.gmst.at(2100)?, c.us.at(2100).unwrap_or(f64::NAN)])
    });
    let rows: Vec<[f64; 3]> = rows.into_iter().collect::<Result<_>>()?;
    let m = |k: usize| stats::mean(&rows.iter().map(|r| r[k]).collect::<Vec<_>>());
    Ok(ClimateSummary {
        gmst_2011_2020: m(0),
        gmst_2100: m(1),
        us_2100: m(2),
        us_delta_2100: m(2) - sh.patterns.us_baseline,
    })
}

/// Table of per-ton values by source.
pub fn write_table<W: Write>(r: &ScghgResults, w: W, round: bool) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    let mut head: Vec<String> =
        ["source", "market", "mortality", "wildfire", "biodiversity", "nonmarket", "total", "total_se"]
            .map(String::from)
            .to_vec();
    if let Some(e) = r.estimates.first() {
        head.extend(e.quantiles.iter().map(|(q, _)| format!("total_q{q}")));
    }
    wtr.write_record(&head)?;
    let f = |x: f64| if round { format!("{}", x.round()) } else { x.to_string() };
    for e in &r.estimates {
        let mut row = vec![e.source.clone()];
        row.extend(
            [e.market, e.mortality, e.wildfire, e.biodiversity, e.nonmarket, e.total, e.total_se]
                .into_iter()
                .map(f),
        );
        row.extend(e.quantiles.iter().map(|(_, v)| f(*v)));
        wtr.write_record(&row)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn write_trials<W: Write>(r: &ScghgResults, sources: &[String], w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record([
        "trial", "source", "param_id", "gcm", "gmst_2100", "us_2100", "loss_2100", "market", "mortality", "wildfire",
        "biodiversity", "total",
    ])?;
    for t in &r.trials {
        for (k, v) in t.values.iter().enumerate() {
            wtr.write_record([
                t.trial.to_string(),
                sources[k].clone(),
                t.param_id.to_string(),
                t.gcm.clone(),
                t.gmst_2100.to_string(),
                t.us_2100.to_string(),
                t.loss_2100[k].to_string(),
                v.market.to_string(),
                v.mortality.to_string(),
                v.wildfire.to_string(),
                v.biodiversity.to_string(),
                v.total().to_string(),
            ])?;
        }
    }
    wtr.flush()?;
    Ok(())
}

/// Labels of the source rows a config produces, in order.
pub fn source_labels(cfg: &RunConfig) -> Vec<String> {
    source_rows(cfg).into_iter().map(source_label).collect()
}
