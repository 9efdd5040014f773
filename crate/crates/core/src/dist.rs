//! Parametric distributions named in configuration files as
//! `{ family = "...", params = [...] }` and validated at parse time.

use rand::Rng;
use rand_distr::{Distribution, LogNormal, Normal, Triangular};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistSpec {
    pub family: String,
    pub params: Vec<f64>,
}

impl DistSpec {
    pub fn new(family: &str, params: &[f64]) -> Self {
        Self { family: family.to_string(), params: params.to_vec() }
    }

    pub fn fixed(v: f64) -> Self {
        Self::new("fixed", &[v])
    }

    /// Returns a description of every problem, empty when valid.
    pub fn check(&self, name: &str) -> Vec<String> {
        let p = &self.params;
        let want = match self.family.as_str() {
            "fixed" => 1,
            "normal" | "lognormal" | "uniform" => 2,
            "truncnormal" => 4,
            "triangular" => 3,
            other => return vec![format!("{name}: unknown distribution family `{other}`")],
        };
        if p.len() != want {
            return vec![format!(
                "{name}: family `{}` takes {want} params, got {}",
                self.family,
                p.len()
            )];
        }
        if p.iter().any(|v| v.is_nan()) {
            return vec![format!("{name}: NaN parameter")];
        }
        let bad = match self.family.as_str() {
            "normal" | "lognormal" => !(p[1] >= 0.0 && p[1].is_finite()),
            "uniform" => !(p[0] <= p[1]),
            "truncnormal" => !(p[1] >= 0.0 && p[2] < p[3]),
            "triangular" => !(p[0] <= p[1] && p[1] <= p[2] && p[0] < p[2]),
            _ => false,
        };
        if bad {
            vec![format!("{name}: invalid params {:?} for `{}`", p, self.family)]
        } else {
            Vec::new()
        }
    }

    /// Draws one value. Call [`DistSpec::check`] first; invalid specs panic.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let p = &self.params;
        match self.family.as_str() {
            "fixed" => p[0],
            "normal" => Normal::new(p[0], p[1]).expect("checked").sample(rng),
            // Parameterised by median and log-sd.
            "lognormal" => LogNormal::new(p[0].ln(), p[1]).expect("checked").sample(rng),
            "uniform" => p[0] + (p[1] - p[0]) * rng.random::<f64>(),
            "truncnormal" => {
                let n = Normal::new(p[0], p[1]).expect("checked");
                for _ in 0..10_000 {
                    let v = n.sample(rng);
                    if v >= p[2] && v <= p[3] {
                        return v;
                    }
                }
                p[0].clamp(p[2], p[3])
            }
            "triangular" => Triangular::new(p[0], p[2], p[1]).expect("checked").sample(rng),
            f => panic!("unchecked distribution family {f}"),
        }
    }

    /// Analytic mean where closed form exists (truncated normal excepted).
    pub fn mean(&self) -> Option<f64> {
        let p = &self.params;
        Some(match self.family.as_str() {
            "fixed" => p[0],
            "normal" => p[0],
            "lognormal" => (p[0].ln() + 0.5 * p[1] * p[1]).exp(),
            "uniform" => 0.5 * (p[0] + p[1]),
            "triangular" => (p[0] + p[1] + p[2]) / 3.0,
            _ => return None,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn triangular_uses_lo_mode_hi_order() {
        let d = DistSpec::new("triangular", &[10.0, 50.0, 250.0]);
        assert!(d.check("d").is_empty());
        assert!((d.mean().unwrap() - 103.333_333_333_333_33).abs() < 1e-9);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let n = 200_000;
        let m: f64 = (0..n).map(|_| d.sample(&mut rng)).sum::<f64>() / n as f64;
        assert!((m - 103.333).abs() < 0.5, "{m}");
    }

    #[test]
    fn bad_specs_are_reported() {
        assert!(!DistSpec::new("gamma", &[1.0]).check("x").is_empty());
        assert!(!DistSpec::new("normal", &[1.0]).check("x").is_empty());
        assert!(!DistSpec::new("triangular", &[3.0, 1.0, 2.0]).check("x").is_empty());
    }

    #[test]
    fn truncnormal_respects_bounds() {
        let d = DistSpec::new("truncnormal", &[0.1, 1.0, 0.0, f64::INFINITY]);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        assert!((0..1000).all(|_| d.sample(&mut rng) >= 0.0));
    }
}
