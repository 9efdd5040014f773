//! Run configuration files, input assembly, manifests and figure tables.
//!
//! Configuration is TOML. Keys absent from the schema are reported together
//! with every range violation, so one edit cycle fixes a file.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::climate::{load_params, sample_param_ensemble, EmulatorConfig, ParamDistributions, ReferencePath};
use crate::damages_macro::surface::{eval_quad, fit_damage_surface, DamageSurface};
use crate::damages_macro::{load_payloads, run_damage, MacroSpec, Study};
use crate::damages_nonmarket::{NonmarketConfig, VslIncome};
use crate::discounting::{CalibrationTarget, RateMode};
use crate::error::{Error, Result};
use crate::feedbacks::FeedbackConfig;
use crate::patterns::{read_gcms, read_pairing, PatternConfig};
use crate::scenario::{load_ensemble, synth_ensemble, SynthTargets};
use crate::scghg::{trial_climate, ModelSetup, RunConfig, SharedInputs};
use crate::stats;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClimateSection {
    pub emulator: EmulatorConfig,
    pub params: ParamDistributions,
    pub ensemble_size: usize,
    pub reference: ReferencePath,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DamagesSection {
    /// Directory of `<study>.toml` payloads overriding the built-ins.
    pub payload_dir: Option<PathBuf>,
    /// Baseline U.S. temperature applied to every payload.
    pub t_base: Option<f64>,
}

/// Optional external inputs; anything absent is synthesized.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InputsSection {
    pub scenarios: Option<PathBuf>,
    pub climate_params: Option<PathBuf>,
    pub pairing: Option<PathBuf>,
    pub gcms: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
    /// Round reported per-ton values to whole dollars in the summary table.
    pub round: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { dir: PathBuf::from("out"), round: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    pub run: RunConfig,
    pub scenario: SynthTargets,
    pub climate: ClimateSection,
    pub patterns: PatternConfig,
    pub feedbacks: FeedbackConfig,
    pub damages: DamagesSection,
    pub nonmarket: NonmarketConfig,
    pub calibration: CalibrationTarget,
    pub inputs: InputsSection,
    pub output: OutputSection,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            run: RunConfig::default(),
            scenario: SynthTargets::default(),
            climate: ClimateSection { ensemble_size: crate::climate::DEFAULT_ENSEMBLE_SIZE, ..Default::default() },
            patterns: PatternConfig::default(),
            feedbacks: FeedbackConfig::default(),
            damages: DamagesSection::default(),
            nonmarket: NonmarketConfig::default(),
            calibration: CalibrationTarget::default(),
            inputs: InputsSection::default(),
            output: OutputSection::default(),
        }
    }
}

/// Default config with every optional field filled, used as the key schema.
fn schema_value() -> toml::Value {
    let mut c = ModelConfig::default();
    c.run.vsl_income = Some(VslIncome::Exogenous);
    c.run.rate_mode = Some(RateMode::B13);
    let p = Some(PathBuf::from("x"));
    c.damages = DamagesSection { payload_dir: p.clone(), t_base: Some(0.0) };
    c.inputs = InputsSection { scenarios: p.clone(), climate_params: p.clone(), pairing: p.clone(), gcms: p };
    toml::Value::try_from(&c).expect("config serializes")
}

/// Removes keys missing from `schema`, returning their dotted paths.
fn strip_unknown(v: &mut toml::Value, schema: &toml::Value, path: &str, out: &mut Vec<String>) {
    match (v, schema) {
        (toml::Value::Table(t), toml::Value::Table(s)) => {
            let keys: Vec<String> = t.keys().cloned().collect();
            for k in keys {
                let p = if path.is_empty() { k.clone() } else { format!("{path}.{k}") };
                match s.get(&k) {
                    Some(sv) => strip_unknown(t.get_mut(&k).expect("key listed"), sv, &p, out),
                    None => {
                        out.push(format!("unknown key `{p}`"));
                        t.remove(&k);
                    }
                }
            }
        }
        (toml::Value::Array(a), toml::Value::Array(s)) => {
            if let Some(first @ toml::Value::Table(_)) = s.first() {
                for (i, x) in a.iter_mut().enumerate() {
                    strip_unknown(x, first, &format!("{path}[{i}]"), out);
                }
            }
        }
        _ => {}
    }
}

impl ModelConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let mut v: toml::Value = toml::from_str(s).map_err(|e| Error::config(format!("TOML: {}", e.message())))?;
        let mut errs = Vec::new();
        strip_unknown(&mut v, &schema_value(), "", &mut errs);
        let cfg: ModelConfig = match v.try_into() {
            Ok(c) => c,
            Err(e) => {
                errs.push(e.message().to_string());
                return Err(Error::Config(errs));
            }
        };
        errs.extend(cfg.validate());
        if errs.is_empty() {
            Ok(cfg)
        } else {
            Err(Error::Config(errs))
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path)
            .map_err(|e| Error::config(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_toml_str(&s)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Vec<String> {
        let mut e = self.run.validate();
        e.extend(self.scenario.validate());
        e.extend(self.climate.emulator.validate());
        e.extend(self.climate.params.validate());
        if self.climate.ensemble_size == 0 {
            e.push("climate.ensemble_size must be positive".into());
        }
        e.extend(self.patterns.validate());
        e.extend(self.feedbacks.validate());
        e.extend(self.nonmarket.validate());
        if let Some(t) = self.damages.t_base {
            if !t.is_finite() {
                e.push("damages.t_base must be finite".into());
            }
        }
        let c = &self.calibration;
        if c.near_horizon == 0 || c.far_horizon == 0 {
            e.push("calibration horizons must be positive".into());
        }
        if !(c.near_rate.is_finite() && c.far_rate.is_finite()) {
            e.push("calibration rates must be finite".into());
        }
        e
    }

    pub fn setup(&self) -> ModelSetup {
        ModelSetup {
            scenario: self.scenario.clone(),
            emulator: self.climate.emulator.clone(),
            param_distributions: self.climate.params.clone(),
            ensemble_size: self.climate.ensemble_size,
            reference: self.climate.reference.clone(),
            patterns: self.patterns.clone(),
            feedbacks: self.feedbacks.clone(),
            nonmarket: self.nonmarket.clone(),
        }
    }

    pub fn payloads(&self) -> Result<Vec<MacroSpec>> {
        let p = load_payloads(self.damages.payload_dir.as_deref())?;
        Ok(match self.damages.t_base {
            Some(t) => p.iter().map(|s| s.with_t_base(t)).collect(),
            None => p,
        })
    }

    /// Loads or synthesizes everything a run needs. `trials` sizes a
    /// synthesized scenario ensemble.
    pub fn shared_inputs(&self, trials: usize) -> Result<SharedInputs> {
        let mut setup = self.setup();
        let inp = &self.inputs;
        if let Some(p) = &inp.gcms {
            setup.patterns.gcms = read_gcms(open(p)?)?;
        }
        let scenarios = match &inp.scenarios {
            Some(p) => load_ensemble(p)?,
            None => synth_ensemble(trials, self.run.seed, &setup.scenario)?,
        };
        let params = match &inp.climate_params {
            Some(p) => load_params(p)?,
            None => sample_param_ensemble(setup.ensemble_size, self.run.seed, &setup.param_distributions)?,
        };
        let pairing = inp.pairing.as_ref().map(|p| read_pairing(open(p)?)).transpose()?;
        SharedInputs::assemble(&setup, scenarios, params, pairing, self.payloads()?)
    }

    /// Paths of external inputs that were configured.
    pub fn input_paths(&self) -> Vec<PathBuf> {
        let i = &self.inputs;
        [&i.scenarios, &i.climate_params, &i.pairing, &i.gcms, &self.damages.payload_dir]
            .into_iter()
            .flatten()
            .filter(|p| p.is_file())
            .cloned()
            .collect()
    }
}

fn open(p: &Path) -> Result<std::fs::File> {
    std::fs::File::open(p).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", p.display()))))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn sha256_file(p: &Path) -> Result<String> {
    Ok(sha256_hex(&std::fs::read(p)?))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

/// Record of a command invocation sufficient to reproduce it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: u64,
    pub trials: usize,
    pub threads: usize,
    pub config: String,
    pub config_sha256: String,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
    /// Wall-clock seconds by stage.
    pub timings: BTreeMap<String, f64>,
}

impl Manifest {
    pub fn new(command: &str, cfg: &ModelConfig) -> Result<Self> {
        let config = cfg.to_toml_string();
        let inputs = cfg
            .input_paths()
            .iter()
            .map(|p| Ok(FileDigest { path: p.display().to_string(), sha256: sha256_file(p)? }))
            .collect::<Result<_>>()?;
        Ok(Self {
            tool: "scghg".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            seed: cfg.run.seed,
            trials: cfg.run.trials,
            threads: crate::par::threads(),
            config_sha256: sha256_hex(config.as_bytes()),
            config,
            inputs,
            outputs: Vec::new(),
            timings: BTreeMap::new(),
        })
    }

    pub fn add_output(&mut self, p: &Path) -> Result<()> {
        self.outputs.push(FileDigest { path: p.display().to_string(), sha256: sha256_file(p)? });
        Ok(())
    }

    pub fn write(&self, p: &Path) -> Result<()> {
        let s = serde_json::to_string_pretty(self).map_err(|e| Error::Io(std::io::Error::other(e)))?;
        std::fs::write(p, s + "\n")?;
        Ok(())
    }
}

/// `(U.S. warming over its baseline, loss fraction)` pairs from every trial
/// at every `step`-th year of the grid.
pub fn surface_points(sh: &SharedInputs, seed: u64, trials: usize, study: Study, step: usize) -> Result<Vec<(f64, f64)>> {
    let spec = sh.payload(study)?;
    let rows = crate::par::map_indexed(trials, |i| -> Result<Vec<(f64, f64)>> {
        let c = trial_climate(sh, seed, i)?;
        let s = c.scenario;
        let d = run_damage(spec, &c.us, s.start_year, s.len())?;
        Ok((0..s.len())
            .step_by(step.max(1))
            .map(|k| {
                let y = s.start_year + k as i32;
                (c.us.at(y).unwrap_or(f64::NAN) - sh.patterns.us_baseline, d.loss(k))
            })
            .collect())
    });
    let mut out = Vec::new();
    for (i, r) in rows.into_iter().enumerate() {
        out.extend(r.map_err(|e| Error::Trial { trial: i, source: Box::new(e) })?);
    }
    Ok(out)
}

/// Coefficient rows `study,kind,c0,c1,c2` for fitted surfaces.
pub fn write_surface<W: Write>(fits: &[(Study, DamageSurface)], w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["study", "kind", "c0", "c1", "c2"])?;
    for (s, f) in fits {
        for (kind, c) in [("mean", f.mean), ("q05", f.q05), ("q95", f.q95)] {
            wtr.write_record([s.as_str(), kind, &c[0].to_string(), &c[1].to_string(), &c[2].to_string()])?;
        }
    }
    wtr.flush()?;
    Ok(())
}

/// Fitted curves on a temperature grid: `study,warming,mean,q05,q95`.
pub fn write_surface_curves<W: Write>(fits: &[(Study, DamageSurface)], grid: &[f64], w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["study", "warming", "mean", "q05", "q95"])?;
    for (s, f) in fits {
        for &t in grid {
            wtr.write_record([
                s.as_str().to_string(),
                t.to_string(),
                eval_quad(&f.mean, t).to_string(),
                eval_quad(&f.q05, t).to_string(),
                eval_quad(&f.q95, t).to_string(),
            ])?;
        }
    }
    wtr.flush()?;
    Ok(())
}

pub fn fit_surfaces(sh: &SharedInputs, seed: u64, trials: usize, studies: &[Study]) -> Result<Vec<(Study, DamageSurface)>> {
    studies
        .iter()
        .map(|&s| Ok((s, fit_damage_surface(&surface_points(sh, seed, trials, s, 10)?)?)))
        .collect()
}

/// Per-year mean and 5th/95th percentiles of GMST and U.S. temperature:
/// `year,gmst_mean,gmst_q05,gmst_q95,us_mean,us_q05,us_q95`.
pub fn write_temp_paths<W: Write>(sh: &SharedInputs, seed: u64, trials: usize, w: W) -> Result<()> {
    let paths = crate::par::map_indexed(trials, |i| -> Result<(Vec<f64>, Vec<f64>)> {
        let c = trial_climate(sh, seed, i)?;
        let s = c.scenario;
        let g = c.gmst.slice(s.start_year, s.end_year())?.to_vec();
        let off = (s.start_year - c.us.start_year) as usize;
        Ok((g, c.us.level[off..off + s.len()].to_vec()))
    });
    let paths: Vec<(Vec<f64>, Vec<f64>)> = paths.into_iter().collect::<Result<_>>()?;
    let first = sh.scenarios.trials.first().ok_or_else(|| Error::config("empty scenario ensemble"))?;
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["year", "gmst_mean", "gmst_q05", "gmst_q95", "us_mean", "us_q05", "us_q95"])?;
    for k in 0..first.len() {
        let mut row = vec![(first.start_year + k as i32).to_string()];
        for pick in [0usize, 1] {
            let mut v: Vec<f64> = paths.iter().map(|p| if pick == 0 { p.0[k] } else { p.1[k] }).collect();
            let m = stats::mean(&v);
            v.sort_by(f64::total_cmp);
            row.extend([m, stats::quantile_sorted(&v, 0.05), stats::quantile_sorted(&v, 0.95)].map(|x| x.to_string()));
        }
        wtr.write_record(&row)?;
    }
    wtr.flush()?;
    Ok(())
}

/// Per-capita consumption growth paths `g[t]` for `t = 1..` from the
/// exogenous scenarios.
pub fn growth_paths(sh: &SharedInputs, trials: usize) -> Vec<Vec<f64>> {
    sh.scenarios
        .trials
        .iter()
        .take(trials)
        .map(|t| (1..t.len()).map(|i| t.pc_gdp(i) / t.pc_gdp(i - 1) - 1.0).collect())
        .collect()
}

pub fn write_term_structure<W: Write>(rates: &[f64], w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["horizon", "rate"])?;
    for (i, r) in rates.iter().enumerate() {
        wtr.write_record([(i + 1).to_string(), r.to_string()])?;
    }
    wtr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_round_trips() {
        let c = ModelConfig::default();
        let back = ModelConfig::from_toml_str(&c.to_toml_string()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn all_violations_are_reported() {
        let s = "[run]\ntrials = 0\nbogus = 1\n[patterns]\nwindow_from = 2020\nwindow_to = 2000\n[nope]\nx = 1\n";
        let Err(Error::Config(v)) = ModelConfig::from_toml_str(s) else { panic!("expected config error") };
        let j = v.join("\n");
        for needle in ["run.bogus", "`nope`", "trials", "window_from"] {
            assert!(j.contains(needle), "{needle} missing from {j}");
        }
    }

    #[test]
    fn optional_keys_are_known() {
        let s = "[run]\nvsl_income = \"net_of_macro\"\nrate_mode = \"b13\"\n[damages]\nt_base = 13.0\n";
        let c = ModelConfig::from_toml_str(s).unwrap();
        assert_eq!(c.run.vsl_income, Some(VslIncome::NetOfMacro));
        assert_eq!(c.damages.t_base, Some(13.0));
    }

    #[test]
    fn b12_with_unit_eta_is_a_config_error() {
        let s = "[run]\nrate_mode = \"b12\"\n[run.discount]\neta = 1.0\n";
        let e = ModelConfig::from_toml_str(s).unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn digest_is_stable() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
