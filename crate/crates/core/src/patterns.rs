//! Pattern scaling from global mean to U.S. mean temperature.
//!
//! GCM patterns are ranked by a normalized TCR/ECS score; emulator parameter
//! sets are ranked by emergent warmth; the two rankings are paired in
//! contiguous groups so that hotter parameter sets inherit hotter patterns.

use std::collections::HashMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::climate::GmstPath;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GcmPattern {
    pub name: String,
    pub tcr: f64,
    pub ecs: f64,
    /// U.S. warming per degree of global warming.
    pub slope: f64,
    /// Offset in degrees C added to the U.S. baseline.
    pub intercept: f64,
}

pub fn default_gcms() -> Vec<GcmPattern> {
    let g = |name: &str, tcr, ecs, slope| GcmPattern { name: name.into(), tcr, ecs, slope, intercept: 0.0 };
    vec![
        g("NorESM2-LM", 1.48, 2.6, 1.25),
        g("GFDL-ESM4", 1.61, 2.62, 1.29),
        g("MPI-ESM1-2-HR", 1.65, 2.97, 1.31),
        g("EC-Earth3-Veg", 2.61, 4.3, 1.38),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnomalyReference {
    /// Regressor is GMST minus its mean over the baseline window.
    Window,
    /// Regressor is GMST relative to pre-industrial.
    Preindustrial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PatternConfig {
    /// U.S. mean temperature over the baseline window, degrees C.
    pub us_baseline: f64,
    pub window_from: i32,
    pub window_to: i32,
    pub reference: AnomalyReference,
    /// Normalizers for the warmth score.
    pub mean_tcr: f64,
    pub mean_ecs: f64,
    pub gcms: Vec<GcmPattern>,
}

impl Default for PatternConfig {
    fn default() -> Self {
        Self {
            us_baseline: 13.62,
            window_from: 1980,
            window_to: 2010,
            reference: AnomalyReference::Window,
            mean_tcr: 2.00,
            mean_ecs: 3.78,
            gcms: default_gcms(),
        }
    }
}

impl PatternConfig {
    pub fn validate(&self) -> Vec<String> {
        let mut e = Vec::new();
        if self.window_from > self.window_to {
            e.push("patterns.window_from must not exceed window_to".into());
        }
        if !(self.mean_tcr > 0.0 && self.mean_ecs > 0.0) {
            e.push("patterns.mean_tcr and mean_ecs must be positive".into());
        }
        if self.gcms.is_empty() {
            e.push("patterns.gcms must list at least one model".into());
        }
        let mut seen = std::collections::BTreeSet::new();
        for g in &self.gcms {
            if !seen.insert(g.name.as_str()) {
                e.push(format!("patterns.gcms: duplicate name `{}`", g.name));
            }
            if !(g.tcr > 0.0 && g.ecs > 0.0 && g.slope.is_finite() && g.intercept.is_finite()) {
                e.push(format!("patterns.gcms.{}: tcr/ecs must be positive, slope/intercept finite", g.name));
            }
        }
        e
    }
}

pub fn weighted_sum(tcr: f64, ecs: f64, mean_tcr: f64, mean_ecs: f64) -> f64 {
    tcr / mean_tcr + ecs / mean_ecs
}

/// GCMs ordered coolest first, with their scores. Ties break on name.
pub fn rank_gcms(gcms: &[GcmPattern], mean_tcr: f64, mean_ecs: f64) -> Vec<(GcmPattern, f64)> {
    let mut v: Vec<_> = gcms
        .iter()
        .map(|g| (g.clone(), weighted_sum(g.tcr, g.ecs, mean_tcr, mean_ecs)))
        .collect();
    v.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.name.cmp(&b.0.name)));
    v
}

/// Assignment of each climate parameter set to one GCM pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct PairingTable {
    /// `(param_id, gcm name)` sorted by `param_id`.
    pub rows: Vec<(u32, String)>,
    index: HashMap<u32, usize>,
}

impl PairingTable {
    pub fn new(mut rows: Vec<(u32, String)>) -> Result<Self> {
        rows.sort_by_key(|r| r.0);
        let mut index = HashMap::with_capacity(rows.len());
        for (k, (id, _)) in rows.iter().enumerate() {
            if index.insert(*id, k).is_some() {
                return Err(Error::Validation(format!("pairing: param id {id} assigned twice")));
            }
        }
        Ok(Self { rows, index })
    }

    pub fn gcm_of(&self, param_id: u32) -> Option<&str> {
        self.index.get(&param_id).map(|&k| self.rows[k].1.as_str())
    }

    /// Number of parameter sets paired with each GCM name.
    pub fn group_sizes(&self) -> HashMap<&str, usize> {
        let mut m = HashMap::new();
        for (_, g) in &self.rows {
            *m.entry(g.as_str()).or_insert(0) += 1;
        }
        m
    }
}

/// Pairs parameter sets with GCMs by rank. `warmth` holds `(param_id, warmth)`.
///
/// Sets are sorted by warmth (ties by id) and split into contiguous groups,
/// one per GCM from coolest to hottest; the remainder goes one each to the
/// coolest groups.
pub fn build_pairing(warmth: &[(u32, f64)], ranked_gcms: &[(GcmPattern, f64)]) -> Result<PairingTable> {
    if ranked_gcms.is_empty() {
        return Err(Error::Argument("pairing needs at least one GCM".into()));
    }
    if warmth.iter().any(|w| !w.1.is_finite()) {
        return Err(Error::Validation("pairing: non-finite warmth".into()));
    }
    let mut sets: Vec<(u32, f64)> = warmth.to_vec();
    sets.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    let k = ranked_gcms.len();
    let (base, rem) = (sets.len() / k, sets.len() % k);
    let mut rows = Vec::with_capacity(sets.len());
    let mut pos = 0;
    for (g, (gcm, _)) in ranked_gcms.iter().enumerate() {
        let size = base + usize::from(g < rem);
        for s in &sets[pos..pos + size] {
            rows.push((s.0, gcm.name.clone()));
        }
        pos += size;
    }
    PairingTable::new(rows)
}

pub fn write_pairing<W: Write>(t: &PairingTable, w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["param_id", "gcm"])?;
    for (id, g) in &t.rows {
        wtr.write_record([id.to_string(), g.clone()])?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_pairing<R: Read>(r: R) -> Result<PairingTable> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
    let h = rdr.headers()?.clone();
    let col = |c: &str| h.iter().position(|x| x == c).ok_or_else(|| Error::Schema(c.to_string()));
    let (ci, cg) = (col("param_id")?, col("gcm")?);
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let id = rec[ci]
            .parse()
            .map_err(|_| Error::Validation(format!("pairing: bad param_id `{}`", &rec[ci])))?;
        rows.push((id, rec[cg].to_string()));
    }
    PairingTable::new(rows)
}

pub fn read_gcms<R: Read>(r: R) -> Result<Vec<GcmPattern>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
    let h = rdr.headers()?.clone();
    for c in ["name", "tcr", "ecs", "slope", "intercept"] {
        if !h.iter().any(|x| x == c) {
            return Err(Error::Schema(c.into()));
        }
    }
    let mut out = Vec::new();
    for rec in rdr.deserialize() {
        let g: GcmPattern = rec?;
        out.push(g);
    }
    Ok(out)
}

/// Annual U.S. mean temperature, degrees C.
#[derive(Debug, Clone, PartialEq)]
pub struct UsTempPath {
    pub start_year: i32,
    pub level: Vec<f64>,
}

impl UsTempPath {
    pub fn end_year(&self) -> i32 {
        self.start_year + self.level.len() as i32 - 1
    }

    pub fn at(&self, year: i32) -> Option<f64> {
        if year < self.start_year || year > self.end_year() {
            None
        } else {
            Some(self.level[(year - self.start_year) as usize])
        }
    }

    pub fn constant(start_year: i32, len: usize, t: f64) -> Self {
        Self { start_year, level: vec![t; len] }
    }
}

/// Regressor offset subtracted from GMST before applying the pattern.
pub fn reference_offset(g: &GmstPath, cfg: &PatternConfig) -> Result<f64> {
    match cfg.reference {
        AnomalyReference::Window => g.window_mean(cfg.window_from, cfg.window_to),
        AnomalyReference::Preindustrial => Ok(0.0),
    }
}

pub fn downscale(g: &GmstPath, p: &GcmPattern, cfg: &PatternConfig) -> Result<UsTempPath> {
    let off = reference_offset(g, cfg)?;
    let base = cfg.us_baseline + p.intercept;
    Ok(UsTempPath {
        start_year: g.start_year,
        level: g.anomaly.iter().map(|&a| base + p.slope * (a - off)).collect(),
    })
}

/// Mean absolute error of a simulated series against observations at shared years.
pub fn historical_mae(observed: &[(i32, f64)], simulated: impl Fn(i32) -> Option<f64>) -> Result<f64> {
    let diffs: Vec<f64> = observed
        .iter()
        .filter_map(|&(y, o)| simulated(y).map(|s| (s - o).abs()))
        .collect();
    if diffs.is_empty() {
        return Err(Error::Validation("historical validation: no overlapping years".into()));
    }
    Ok(diffs.iter().sum::<f64>() / diffs.len() as f64)
}

/// Reads `year,<column>` observations.
pub fn read_observed<R: Read>(r: R, column: &str) -> Result<Vec<(i32, f64)>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
    let h = rdr.headers()?.clone();
    let cy = h.iter().position(|x| x == "year").ok_or_else(|| Error::Schema("year".into()))?;
    let cv = h.iter().position(|x| x == column).ok_or_else(|| Error::Schema(column.into()))?;
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let y = rec[cy].parse().map_err(|_| Error::Validation(format!("observed: bad year `{}`", &rec[cy])))?;
        let v = rec[cv].parse().map_err(|_| Error::Validation(format!("observed {y}: bad value")))?;
        out.push((y, v));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn remainder_goes_to_coolest_groups() {
        let ranked = rank_gcms(&default_gcms(), 2.0, 3.78);
        let w: Vec<(u32, f64)> = (0..2237u32).map(|i| (i, f64::from(i).sin())).collect();
        let t = build_pairing(&w, &ranked).unwrap();
        let sizes = t.group_sizes();
        let got: Vec<usize> = ranked.iter().map(|(g, _)| sizes[g.name.as_str()]).collect();
        assert_eq!(got, vec![560, 559, 559, 559]);
    }

    #[test]
    fn pairing_ignores_input_order() {
        let ranked = rank_gcms(&default_gcms(), 2.0, 3.78);
        let w: Vec<(u32, f64)> = (0..50u32).map(|i| (i, f64::from(i % 7))).collect();
        let mut r = w.clone();
        r.reverse();
        assert_eq!(build_pairing(&w, &ranked).unwrap(), build_pairing(&r, &ranked).unwrap());
    }

    #[test]
    fn downscale_uses_window_mean() {
        let g = GmstPath { start_year: 1980, anomaly: (0..121).map(|i| 0.01 * f64::from(i)).collect() };
        let p = GcmPattern { name: "x".into(), tcr: 1.0, ecs: 2.0, slope: 2.0, intercept: 0.5 };
        let cfg = PatternConfig::default();
        let us = downscale(&g, &p, &cfg).unwrap();
        // Window 1980..=2010 mean is 0.15.
        let expect = 13.62 + 0.5 + 2.0 * (1.0 - 0.15);
        assert!((us.at(2080).unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn missing_window_is_an_error() {
        let g = GmstPath { start_year: 2020, anomaly: vec![1.0; 10] };
        assert!(downscale(&g, &default_gcms()[0], &PatternConfig::default()).is_err());
    }
}
