//! Quadratic damage surfaces over (temperature, loss) points: least squares
//! for the mean and pinball-loss regression for the 5th and 95th percentiles.

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};

pub const MIN_POINTS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DamageSurface {
    /// `[c0, c1, c2]` of `c0 + c1 T + c2 T^2`.
    pub mean: [f64; 3],
    pub q05: [f64; 3],
    pub q95: [f64; 3],
}

pub fn eval_quad(c: &[f64; 3], t: f64) -> f64 {
    c[0] + t * (c[1] + t * c[2])
}

pub fn pinball_loss(c: &[f64; 3], points: &[(f64, f64)], tau: f64) -> f64 {
    points
        .iter()
        .map(|&(t, y)| {
            let r = y - eval_quad(c, t);
            if r >= 0.0 {
                tau * r
            } else {
                (tau - 1.0) * r
            }
        })
        .sum()
}

fn check_design(points: &[(f64, f64)]) -> Result<()> {
    if points.len() < MIN_POINTS {
        return Err(Error::Fit(format!("need at least {MIN_POINTS} points, got {}", points.len())));
    }
    if points.iter().any(|p| !(p.0.is_finite() && p.1.is_finite())) {
        return Err(Error::Fit("non-finite point".into()));
    }
    let mut ts: Vec<f64> = points.iter().map(|p| p.0).collect();
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    if ts.len() < 3 {
        return Err(Error::Fit("degenerate design: fewer than three distinct temperatures".into()));
    }
    Ok(())
}

fn row(t: f64) -> Vector3<f64> {
    Vector3::new(1.0, t, t * t)
}

fn solve(a: Matrix3<f64>, b: Vector3<f64>) -> Result<[f64; 3]> {
    let x = a
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::Fit("singular normal equations".into()))?;
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Fit("singular normal equations".into()));
    }
    Ok([x[0], x[1], x[2]])
}

pub fn fit_ols_quadratic(points: &[(f64, f64)]) -> Result<[f64; 3]> {
    check_design(points)?;
    let mut a = Matrix3::zeros();
    let mut b = Vector3::zeros();
    for &(t, y) in points {
        let x = row(t);
        a += x * x.transpose();
        b += x * y;
    }
    solve(a, b)
}

/// Pinball-loss quadratic fit by majorize-minimize iterations, finished by
/// testing the interpolating fit through the three smallest residuals.
pub fn fit_quantile_quadratic(points: &[(f64, f64)], tau: f64) -> Result<[f64; 3]> {
    check_design(points)?;
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::Argument(format!("quantile {tau} outside (0, 1)")));
    }
    let scale = points.iter().map(|p| p.1.abs()).sum::<f64>() / points.len() as f64 + 1e-300;
    let eps = 1e-9 * scale;
    let mut beta = fit_ols_quadratic(points)?;
    let mut obj = pinball_loss(&beta, points, tau);
    let shift = 2.0 * tau - 1.0;
    for _ in 0..2000 {
        let mut a = Matrix3::zeros();
        let mut b = Vector3::zeros();
        for &(t, y) in points {
            let x = row(t);
            let w = 1.0 / (eps + (y - eval_quad(&beta, t)).abs());
            a += x * x.transpose() * w;
            b += x * (w * y + shift);
        }
        let next = solve(a, b)?;
        let nobj = pinball_loss(&next, points, tau);
        let done = (obj - nobj).abs() <= 1e-15 * obj.abs().max(1e-300);
        if nobj <= obj {
            beta = next;
            obj = nobj;
        }
        if done {
            break;
        }
    }
    // Vertex polish: the optimum interpolates three points.
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by(|&i, &j| {
        let ri = (points[i].1 - eval_quad(&beta, points[i].0)).abs();
        let rj = (points[j].1 - eval_quad(&beta, points[j].0)).abs();
        ri.total_cmp(&rj)
    });
    let pick: Vec<usize> = {
        let mut v: Vec<usize> = Vec::new();
        for &i in &idx {
            if v.iter().all(|&j| points[j].0 != points[i].0) {
                v.push(i);
            }
            if v.len() == 3 {
                break;
            }
        }
        v
    };
    if pick.len() == 3 {
        let mut a = Matrix3::zeros();
        let mut b = Vector3::zeros();
        for (r, &i) in pick.iter().enumerate() {
            let x = row(points[i].0);
            a.set_row(r, &x.transpose());
            b[r] = points[i].1;
        }
        if let Ok(v) = solve(a, b) {
            if pinball_loss(&v, points, tau) < obj {
                beta = v;
            }
        }
    }
    Ok(beta)
}

/// Mean (least squares) and 5th/95th percentile quadratic fits of loss on temperature.
pub fn fit_damage_surface(points: &[(f64, f64)]) -> Result<DamageSurface> {
    Ok(DamageSurface {
        mean: fit_ols_quadratic(points)?,
        q05: fit_quantile_quadratic(points, 0.05)?,
        q95: fit_quantile_quadratic(points, 0.95)?,
    })
}
