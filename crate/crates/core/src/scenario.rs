//! Socioeconomic and emissions scenarios on an annual grid.
//!
//! A scenario trial carries U.S. population, U.S. GDP (2020 USD) and global
//! CO2 (Gt/yr), CH4 (Mt/yr) and N2O (Mt/yr) emissions. Ensembles are either
//! loaded from CSV (`trial,year,pop,gdp,co2,ch4,n2o`) or synthesized.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

pub const START_YEAR: i32 = 2020;
pub const END_YEAR: i32 = 2300;

const COLUMNS: [&str; 7] = ["trial", "year", "pop", "gdp", "co2", "ch4", "n2o"];

#[derive(Debug, Clone, PartialEq)]
pub struct TrialScenario {
    pub trial_id: u32,
    pub start_year: i32,
    pub pop: Vec<f64>,
    pub gdp: Vec<f64>,
    pub co2: Vec<f64>,
    pub ch4: Vec<f64>,
    pub n2o: Vec<f64>,
}

impl TrialScenario {
    pub fn len(&self) -> usize {
        self.pop.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pop.is_empty()
    }

    pub fn end_year(&self) -> i32 {
        self.start_year + self.len() as i32 - 1
    }

    pub fn years(&self) -> impl Iterator<Item = i32> + '_ {
        (0..self.len()).map(move |i| self.start_year + i as i32)
    }

    pub fn index_of(&self, year: i32) -> Result<usize> {
        if year < self.start_year || year > self.end_year() {
            return Err(Error::Range { year, start: self.start_year, end: self.end_year() });
        }
        Ok((year - self.start_year) as usize)
    }

    pub fn pc_gdp(&self, i: usize) -> f64 {
        self.gdp[i] / self.pop[i]
    }

    /// Checks positivity and finiteness of every series.
    pub fn validate(&self) -> Result<()> {
        let n = self.len();
        for (name, s) in [("gdp", &self.gdp), ("co2", &self.co2), ("ch4", &self.ch4), ("n2o", &self.n2o)] {
            if s.len() != n {
                return Err(Error::Validation(format!(
                    "trial {}: series {name} has {} values, expected {n}",
                    self.trial_id,
                    s.len()
                )));
            }
        }
        for i in 0..n {
            for (name, s) in self.series() {
                let v = s[i];
                if !(v.is_finite() && v > 0.0) {
                    return Err(Error::Validation(format!(
                        "trial {}, year {}: {name} = {v} is not strictly positive",
                        self.trial_id,
                        self.start_year + i as i32
                    )));
                }
            }
        }
        Ok(())
    }

    fn series(&self) -> [(&'static str, &Vec<f64>); 5] {
        [("pop", &self.pop), ("gdp", &self.gdp), ("co2", &self.co2), ("ch4", &self.ch4), ("n2o", &self.n2o)]
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScenarioEnsemble {
    pub trials: Vec<TrialScenario>,
}

impl ScenarioEnsemble {
    pub fn len(&self) -> usize {
        self.trials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trials.is_empty()
    }
}

/// Per-capita GDP growth, `g_t = pc_t / pc_{t-1} - 1`, for years `start+1..=end`.
pub fn growth_path(s: &TrialScenario) -> Vec<f64> {
    (1..s.len()).map(|i| s.pc_gdp(i) / s.pc_gdp(i - 1) - 1.0).collect()
}

pub fn load_ensemble(path: &Path) -> Result<ScenarioEnsemble> {
    let f = std::fs::File::open(path)?;
    read_ensemble(f)
}

pub fn read_ensemble<R: Read>(reader: R) -> Result<ScenarioEnsemble> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let mut idx = [0usize; 7];
    for (k, col) in COLUMNS.iter().enumerate() {
        idx[k] = headers
            .iter()
            .position(|h| h == *col)
            .ok_or_else(|| Error::Schema((*col).to_string()))?;
    }
    let mut rows: BTreeMap<u32, Vec<(i32, [f64; 5])>> = BTreeMap::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let field = |k: usize| rec.get(idx[k]).unwrap_or("");
        let trial: u32 = field(0)
            .parse()
            .map_err(|_| Error::Validation(format!("row {}: bad trial id `{}`", line + 2, field(0))))?;
        let year: i32 = field(1)
            .parse()
            .map_err(|_| Error::Validation(format!("row {}: bad year `{}`", line + 2, field(1))))?;
        let mut vals = [0.0; 5];
        for (j, v) in vals.iter_mut().enumerate() {
            *v = field(j + 2).parse().map_err(|_| {
                Error::Validation(format!(
                    "trial {trial}, year {year}: {} = `{}` is not a number",
                    COLUMNS[j + 2],
                    field(j + 2)
                ))
            })?;
        }
        rows.entry(trial).or_default().push((year, vals));
    }
    let mut trials = Vec::with_capacity(rows.len());
    let mut grid: Option<(i32, usize)> = None;
    for (trial, mut r) in rows {
        r.sort_by_key(|(y, _)| *y);
        let start = r[0].0;
        for (k, (y, _)) in r.iter().enumerate() {
            let expect = start + k as i32;
            if *y != expect {
                let missing = if *y > expect { expect } else { *y };
                return Err(Error::Validation(format!(
                    "trial {trial}: gap or duplicate at year {missing}"
                )));
            }
        }
        match grid {
            None => grid = Some((start, r.len())),
            Some(g) if g != (start, r.len()) => {
                return Err(Error::Validation(format!(
                    "trial {trial}: grid {}..={} differs from the first trial",
                    start,
                    start + r.len() as i32 - 1
                )))
            }
            _ => {}
        }
        let col = |j: usize| r.iter().map(|(_, v)| v[j]).collect::<Vec<_>>();
        let s = TrialScenario {
            trial_id: trial,
            start_year: start,
            pop: col(0),
            gdp: col(1),
            co2: col(2),
            ch4: col(3),
            n2o: col(4),
        };
        s.validate()?;
        trials.push(s);
    }
    Ok(ScenarioEnsemble { trials })
}

pub fn write_ensemble<W: Write>(ens: &ScenarioEnsemble, w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(COLUMNS)?;
    for t in &ens.trials {
        for i in 0..t.len() {
            wtr.write_record([
                t.trial_id.to_string(),
                (t.start_year + i as i32).to_string(),
                t.pop[i].to_string(),
                t.gdp[i].to_string(),
                t.co2[i].to_string(),
                t.ch4[i].to_string(),
                t.n2o[i].to_string(),
            ])?;
        }
    }
    wtr.flush()?;
    Ok(())
}

/// Piecewise-linear path through `(year, value)` knots, flat outside.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Knots(pub Vec<(f64, f64)>);

impl Knots {
    pub fn at(&self, x: f64) -> f64 {
        let k = &self.0;
        if x <= k[0].0 {
            return k[0].1;
        }
        for w in k.windows(2) {
            let ((x0, y0), (x1, y1)) = (w[0], w[1]);
            if x <= x1 {
                return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
            }
        }
        k[k.len() - 1].1
    }

    pub fn validate(&self, name: &str, errs: &mut Vec<String>) {
        if self.0.is_empty() {
            errs.push(format!("{name}: at least one knot required"));
            return;
        }
        if self.0.windows(2).any(|w| w[1].0 <= w[0].0) {
            errs.push(format!("{name}: knot abscissae must be strictly increasing"));
        }
    }
}

/// Targets and spreads for the synthetic ensemble.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthTargets {
    pub start_year: i32,
    pub end_year: i32,
    pub pop_start: f64,
    pub pop_peak: f64,
    pub pop_peak_year: i32,
    pub pop_end: f64,
    /// Log-sd of population across trials at the final year.
    pub pop_sd_end: f64,
    pub pc_gdp_start: f64,
    /// Mean growth in the first projected year.
    pub growth_first: f64,
    /// Mean growth over `mid_from..=mid_to`.
    pub growth_mid: f64,
    pub mid_from: i32,
    pub mid_to: i32,
    /// Mean growth from `late_from` onwards.
    pub growth_late: f64,
    pub late_from: i32,
    /// AR(1) persistence of transitory growth deviations.
    pub growth_ar: f64,
    /// Stationary sd of transitory growth deviations.
    pub growth_sd: f64,
    /// Sd of the per-trial long-run growth offset.
    pub growth_offset_sd: f64,
    pub co2_path: Knots,
    pub ch4_path: Knots,
    pub n2o_path: Knots,
    /// Log-sd of the per-trial emissions factor once fully ramped in.
    pub emissions_sd: f64,
    /// Correlation between the emissions factor and the long-run growth offset.
    pub emissions_growth_corr: f64,
}

impl Default for SynthTargets {
    fn default() -> Self {
        Self {
            start_year: START_YEAR,
            end_year: END_YEAR,
            pop_start: 331.5e6,
            pop_peak: 392.0e6,
            pop_peak_year: 2150,
            pop_end: 365.0e6,
            pop_sd_end: 0.12,
            pc_gdp_start: 63_500.0,
            growth_first: 0.017,
            growth_mid: 0.015,
            mid_from: 2030,
            mid_to: 2100,
            growth_late: 0.010,
            late_from: 2200,
            growth_ar: 0.8,
            growth_sd: 0.008,
            growth_offset_sd: 0.005,
            co2_path: Knots(vec![(2020.0, 40.0), (2035.0, 38.0), (2100.0, 10.0), (2200.0, 3.0), (2300.0, 2.0)]),
            ch4_path: Knots(vec![(2020.0, 380.0), (2050.0, 350.0), (2100.0, 260.0), (2300.0, 200.0)]),
            n2o_path: Knots(vec![(2020.0, 11.0), (2100.0, 11.0), (2300.0, 9.0)]),
            emissions_sd: 0.35,
            emissions_growth_corr: 0.6,
        }
    }
}

impl SynthTargets {
    pub fn validate(&self) -> Vec<String> {
        let mut e = Vec::new();
        if self.end_year <= self.start_year {
            e.push("scenario.end_year must exceed start_year".into());
        }
        if self.pop_peak_year < self.start_year {
            e.push(format!(
                "scenario.pop_peak_year {} precedes start_year {}",
                self.pop_peak_year, self.start_year
            ));
        }
        if self.pop_peak_year > self.end_year {
            e.push("scenario.pop_peak_year is after end_year".into());
        }
        for (n, v) in [
            ("pop_start", self.pop_start),
            ("pop_peak", self.pop_peak),
            ("pop_end", self.pop_end),
            ("pc_gdp_start", self.pc_gdp_start),
        ] {
            if !(v.is_finite() && v > 0.0) {
                e.push(format!("scenario.{n} must be positive"));
            }
        }
        if self.pop_peak < self.pop_start.max(self.pop_end) {
            e.push("scenario.pop_peak must be at least pop_start and pop_end".into());
        }
        if !(0.0..1.0).contains(&self.growth_ar) {
            e.push("scenario.growth_ar must lie in [0, 1)".into());
        }
        for (n, v) in [
            ("growth_sd", self.growth_sd),
            ("growth_offset_sd", self.growth_offset_sd),
            ("pop_sd_end", self.pop_sd_end),
            ("emissions_sd", self.emissions_sd),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                e.push(format!("scenario.{n} must be non-negative"));
            }
        }
        if !(-1.0..=1.0).contains(&self.emissions_growth_corr) {
            e.push("scenario.emissions_growth_corr must lie in [-1, 1]".into());
        }
        if !(self.start_year < self.mid_from && self.mid_from <= self.mid_to && self.mid_to < self.late_from) {
            e.push("scenario: need start_year < mid_from <= mid_to < late_from".into());
        }
        self.co2_path.validate("scenario.co2_path", &mut e);
        self.ch4_path.validate("scenario.ch4_path", &mut e);
        self.n2o_path.validate("scenario.n2o_path", &mut e);
        for (n, k) in [("co2_path", &self.co2_path), ("ch4_path", &self.ch4_path), ("n2o_path", &self.n2o_path)] {
            if k.0.iter().any(|&(_, v)| !(v > 0.0)) {
                e.push(format!("scenario.{n}: values must be positive"));
            }
        }
        e
    }

    /// Target mean population.
    pub fn pop_target(&self, year: i32) -> f64 {
        let y = f64::from(year);
        let (s, p, e) = (f64::from(self.start_year), f64::from(self.pop_peak_year), f64::from(self.end_year));
        if y <= p {
            let x = if p > s { (y - s) / (p - s) } else { 1.0 };
            self.pop_start + (self.pop_peak - self.pop_start) * (0.5 * std::f64::consts::PI * x).sin()
        } else {
            let x = (y - p) / (e - p);
            self.pop_peak - (self.pop_peak - self.pop_end) * (1.0 - (0.5 * std::f64::consts::PI * x).cos())
        }
    }

    /// Target mean per-capita growth.
    pub fn growth_target(&self, year: i32) -> f64 {
        let first = self.start_year + 1;
        if year <= first {
            self.growth_first
        } else if year < self.mid_from {
            let w = f64::from(year - first) / f64::from(self.mid_from - first);
            self.growth_first + (self.growth_mid - self.growth_first) * w
        } else if year <= self.mid_to {
            self.growth_mid
        } else if year < self.late_from {
            let w = f64::from(year - self.mid_to) / f64::from(self.late_from - self.mid_to);
            self.growth_mid + (self.growth_late - self.growth_mid) * w
        } else {
            self.growth_late
        }
    }
}

/// Synthesizes `n` trials. Deterministic in `seed`; each trial has its own stream.
pub fn synth_ensemble(n: usize, seed: u64, targets: &SynthTargets) -> Result<ScenarioEnsemble> {
    let errs = targets.validate();
    if !errs.is_empty() {
        return Err(Error::Config(errs));
    }
    let trials = crate::par::map_indexed(n, |i| synth_trial(i as u32, seed, targets));
    Ok(ScenarioEnsemble { trials })
}

fn synth_trial(trial_id: u32, seed: u64, t: &SynthTargets) -> TrialScenario {
    let mut rng = rng::stream(seed, u64::from(trial_id), "scenario");
    let len = (t.end_year - t.start_year + 1) as usize;
    let span = f64::from(t.end_year - t.start_year);
    let z_pop: f64 = rng.sample(StandardNormal);
    let z_growth: f64 = rng.sample(StandardNormal);
    let z_emit_own: f64 = rng.sample(StandardNormal);
    let rho = t.emissions_growth_corr;
    let z_emit = rho * z_growth + (1.0 - rho * rho).sqrt() * z_emit_own;

    let innov_sd = t.growth_sd * (1.0 - t.growth_ar * t.growth_ar).sqrt();
    let mut x: f64 = t.growth_sd * rng.sample::<f64, _>(StandardNormal);

    let mut pop = Vec::with_capacity(len);
    let mut gdp = Vec::with_capacity(len);
    let (mut co2, mut ch4, mut n2o) = (Vec::with_capacity(len), Vec::with_capacity(len), Vec::with_capacity(len));
    let mut pc = t.pc_gdp_start;
    for i in 0..len {
        let year = t.start_year + i as i32;
        let h = f64::from(year - t.start_year);
        let sp = t.pop_sd_end * (h / span).sqrt();
        let p = t.pop_target(year) * (sp * z_pop - 0.5 * sp * sp).exp();
        if i > 0 {
            x = t.growth_ar * x + innov_sd * rng.sample::<f64, _>(StandardNormal);
            let ramp = (h / 50.0).min(1.0);
            let g = t.growth_target(year) + t.growth_offset_sd * z_growth * ramp + x;
            pc *= 1.0 + g.max(-0.5);
        }
        pop.push(p);
        gdp.push(p * pc);
        let se = t.emissions_sd * (h / 80.0).min(1.0);
        let f = (se * z_emit - 0.5 * se * se).exp();
        let yf = f64::from(year);
        co2.push(t.co2_path.at(yf) * f);
        ch4.push(t.ch4_path.at(yf) * f);
        n2o.push(t.n2o_path.at(yf) * f);
    }
    TrialScenario { trial_id, start_year: t.start_year, pop, gdp, co2, ch4, n2o }
}
