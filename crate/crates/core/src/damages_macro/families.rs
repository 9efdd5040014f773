use super::{Family, FirDriver, MacroSpec, Quad};
use crate::error::{Error, Result};

/// Temperature history plus projection, indexed from the first projected year.
/// Indices before the available history read `t_base`.
pub struct TempSeries<'a> {
    hist: &'a [f64],
    proj: &'a [f64],
    t_base: f64,
}

impl<'a> TempSeries<'a> {
    pub fn new(hist: &'a [f64], proj: &'a [f64], t_base: f64) -> Self {
        Self { hist, proj, t_base }
    }

    pub fn len(&self) -> usize {
        self.proj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.proj.is_empty()
    }

    #[inline]
    pub fn at(&self, i: isize) -> f64 {
        if i >= 0 {
            self.proj[i as usize]
        } else {
            let k = self.hist.len() as isize + i;
            if k >= 0 {
                self.hist[k as usize]
            } else {
                self.t_base
            }
        }
    }

    /// Previous-year temperature for difference-based families: the
    /// projection starts from the baseline climate.
    #[inline]
    fn prev_for_diff(&self, i: usize) -> f64 {
        if i == 0 {
            self.t_base
        } else {
            self.proj[i - 1]
        }
    }

    fn trailing_mean(&self, i: isize, window: usize) -> f64 {
        (0..window as isize).map(|k| self.at(i - k)).sum::<f64>() / window as f64
    }
}

pub fn simulate(spec: &MacroSpec, t: &TempSeries) -> Vec<f64> {
    let tb = spec.t_base;
    let n = t.len();
    match &spec.model {
        Family::PermanentGrowth { b1, b2 } => {
            let q = Quad { b1: *b1, b2: *b2 };
            let q0 = q.at(tb);
            let mut gap = 0.0;
            (0..n)
                .map(|i| {
                    gap += q.at(t.proj[i]) - q0;
                    gap
                })
                .collect()
        }
        Family::LevelQuadratic { b1, b2 } => {
            let q = Quad { b1: *b1, b2: *b2 };
            let q0 = q.at(tb);
            t.proj.iter().map(|&x| q.at(x) - q0).collect()
        }
        Family::LevelInteracted { b1, b2, lag_b1, lag_b2 } => {
            let q = Quad { b1: *b1, b2: *b2 };
            let ql = Quad { b1: *lag_b1, b2: *lag_b2 };
            let (q0, ql0) = (q.at(tb), ql.at(tb));
            (0..n).map(|i| (q.at(t.proj[i]) - q0) + (ql.at(t.at(i as isize - 1)) - ql0)).collect()
        }
        Family::FiniteImpulse { driver, weights } => {
            let qs: Vec<Quad> = weights.iter().map(|w| Quad { b1: w[0], b2: w[1] }).collect();
            match driver {
                FirDriver::Levels => (0..n as isize)
                    .map(|i| qs.iter().enumerate().map(|(k, q)| q.at(t.at(i - k as isize)) - q.at(tb)).sum())
                    .collect(),
                FirDriver::Innovations => {
                    // Cumulative response at horizon k applied to the first difference
                    // of temperature k years back; nothing past the last horizon.
                    let mut cum = Vec::with_capacity(qs.len());
                    let mut acc = Quad { b1: 0.0, b2: 0.0 };
                    for q in &qs {
                        acc = Quad { b1: acc.b1 + q.b1, b2: acc.b2 + q.b2 };
                        cum.push(acc);
                    }
                    (0..n as isize)
                        .map(|i| {
                            cum.iter()
                                .enumerate()
                                .filter(|(k, _)| i - *k as isize >= 0)
                                .map(|(k, c)| {
                                    let s = (i - k as isize) as usize;
                                    c.at(t.proj[s]) - c.at(t.prev_for_diff(s))
                                })
                                .sum()
                        })
                        .collect()
                }
            }
        }
        Family::ArdlAdaptation { window, ar, pos, neg, trend } => {
            let own = ardl(t, *window, ar, pos, neg);
            if *trend == 0.0 {
                own
            } else {
                let h = t.hist.len();
                let cf_hist: Vec<f64> = (0..h).map(|k| tb + trend * (k as f64 - h as f64 + 1.0)).collect();
                let cf_proj: Vec<f64> = (0..n).map(|i| tb + trend * (i as f64 + 1.0)).collect();
                let cf = ardl(&TempSeries::new(&cf_hist, &cf_proj, tb), *window, ar, pos, neg);
                own.iter().zip(cf).map(|(a, b)| a - b).collect()
            }
        }
        Family::TfpSolow { b1, b2, carry, alpha, saving: _, depreciation, growth } => {
            let q = Quad { b1: *b1, b2: *b2 };
            let gd = growth + depreciation;
            let (mut x, mut a, mut ga) = (0.0f64, 0.0f64, 0.0f64);
            let mut out = Vec::with_capacity(n);
            for i in 0..n {
                ga = carry * ga + q.at(t.proj[i]) - q.at(t.prev_for_diff(i));
                a += ga;
                out.push(alpha * x + (1.0 - alpha) * a);
                // Capital per efficiency unit relative to balanced growth; the
                // saving rate cancels against the steady state.
                x = ((gd * (alpha * x + (1.0 - alpha) * a).exp() + (1.0 - depreciation) * x.exp()) / (1.0 + growth)).ln();
            }
            out
        }
        Family::Convergence { b1, b2, carry } => {
            let q = Quad { b1: *b1, b2: *b2 };
            let q0 = q.at(tb);
            let mut gap = 0.0;
            t.proj
                .iter()
                .map(|&x| {
                    gap = carry * gap + (q.at(x) - q0);
                    gap
                })
                .collect()
        }
        Family::StateDependentCrr { knots, smoothing, window, horizon, persistence } => {
            let phi = persistence.powf(1.0 / *horizon as f64);
            let h = *horizon;
            // cum[k]: cumulative temperature response k years after a unit shock.
            let mut cum = Vec::with_capacity(h + 1);
            let mut acc = 0.0;
            for k in 0..=h {
                acc += phi.powi(k as i32);
                cum.push(acc);
            }
            let crr = Crr::new(knots, *smoothing);
            let shocks: Vec<f64> = (0..n)
                .map(|i| (t.proj[i] - t.prev_for_diff(i)) * crr.at(t.trailing_mean(i as isize, *window)))
                .collect();
            let mut settled = 0.0;
            (0..n)
                .map(|i| {
                    if i >= h {
                        settled += shocks[i - h] * cum[h];
                    }
                    let recent: f64 = (0..h.min(i + 1)).map(|k| shocks[i - k] * cum[k]).sum();
                    settled + recent
                })
                .collect()
        }
    }
}

fn ardl(t: &TempSeries, window: usize, ar: &[f64], pos: &[f64], neg: &[f64]) -> Vec<f64> {
    let n = t.len();
    let q = pos.len();
    // Drivers for lags reaching back before the projection use history.
    // Mean of differences rather than difference of means: exact zero in a steady climate.
    let driver = |i: isize| (1..=window as isize).map(|k| t.at(i) - t.at(i - k)).sum::<f64>() / window as f64;
    let d: Vec<f64> = (-(q as isize)..n as isize).map(driver).collect();
    let mut growth: Vec<f64> = Vec::with_capacity(n);
    let mut gap = 0.0;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut g = 0.0;
        for (j, phi) in ar.iter().enumerate() {
            if i > j {
                g += phi * growth[i - 1 - j];
            }
        }
        for k in 0..q {
            let dk = d[i + q - k];
            g += pos[k] * dk.max(0.0) + neg[k] * (-dk).max(0.0);
        }
        growth.push(g);
        gap += g;
        out.push(gap);
    }
    out
}

/// Piecewise-linear response ratio, linearly extrapolated, optionally
/// box-smoothed over `width` degrees.
pub struct Crr<'a> {
    knots: &'a [[f64; 2]],
    width: f64,
}

impl<'a> Crr<'a> {
    pub fn new(knots: &'a [[f64; 2]], width: f64) -> Self {
        Self { knots, width }
    }

    fn raw(&self, x: f64) -> f64 {
        let k = self.knots;
        let seg = k.windows(2).position(|w| x <= w[1][0]).unwrap_or(k.len() - 2);
        let (a, b) = (k[seg], k[seg + 1]);
        a[1] + (b[1] - a[1]) * (x - a[0]) / (b[0] - a[0])
    }

    /// Antiderivative of `raw` from the first knot.
    fn integral(&self, x: f64) -> f64 {
        let k = self.knots;
        let x0 = k[0][0];
        if x <= x0 {
            return 0.5 * (self.raw(x) + k[0][1]) * (x - x0);
        }
        let mut acc = 0.0;
        for w in k.windows(2) {
            let (a, b) = (w[0], w[1]);
            if x <= b[0] {
                return acc + 0.5 * (a[1] + self.raw(x)) * (x - a[0]);
            }
            acc += 0.5 * (a[1] + b[1]) * (b[0] - a[0]);
        }
        let last = k[k.len() - 1];
        acc + 0.5 * (last[1] + self.raw(x)) * (x - last[0])
    }

    pub fn at(&self, x: f64) -> f64 {
        if self.width <= 0.0 {
            self.raw(x)
        } else {
            let h = 0.5 * self.width;
            (self.integral(x + h) - self.integral(x - h)) / self.width
        }
    }
}

/// Temperature where the unsmoothed response ratio changes sign.
pub fn crr_zero(knots: &[[f64; 2]]) -> Result<f64> {
    for w in knots.windows(2) {
        let (a, b) = (w[0], w[1]);
        if a[1] == 0.0 {
            return Ok(a[0]);
        }
        if a[1] > 0.0 && b[1] <= 0.0 {
            return Ok(a[0] + a[1] * (b[0] - a[0]) / (a[1] - b[1]));
        }
    }
    Err(Error::Domain("response ratio never changes sign over its knots".into()))
}
