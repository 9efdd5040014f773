use super::surface::*;
use super::*;
use proptest::prelude::*;

fn spec(s: Study) -> MacroSpec {
    s.default_spec()
}

fn irf(s: Study, h: usize) -> Vec<f64> {
    impulse_response(&spec(s), h, T_EVAL).unwrap().response
}

fn constant_path(t: f64, len: usize) -> UsTempPath {
    UsTempPath::constant(1990, len, t)
}

#[test]
fn every_payload_parses_and_validates() {
    for s in Study::ALL {
        let sp = spec(s);
        assert_eq!(sp.study, s);
        assert!(sp.validate().is_empty(), "{s}: {:?}", sp.validate());
        assert_eq!(sp.t_base, T_BASE);
    }
}

#[test]
fn payload_rejects_unknown_fields() {
    let s = "study = \"burke\"\n[model]\nfamily = \"permanent_growth\"\nb1 = 0.01\nb2 = -0.0004\nb3 = 1.0\n";
    assert!(matches!(MacroSpec::from_toml(s), Err(Error::Config(_))));
}

#[test]
fn optima_match_payloads() {
    let close = |s: Study, want: f64, tol: f64| {
        let got = optimum_of(&spec(s)).unwrap();
        assert!((got - want).abs() < tol, "{s}: {got} vs {want}");
    };
    close(Study::Kalkuhl, 5.4, 1e-9);
    close(Study::Nath, 13.0, 1e-12);
    close(Study::Harding, 13.2, 1e-9);
    close(Study::Acevedo, 13.0, 1e-9);
    assert!(matches!(optimum_of(&spec(Study::Kahn)), Err(Error::Domain(_))));
}

#[test]
fn convex_quadratic_has_no_optimum() {
    let mut s = spec(Study::Newell);
    s.model = Family::LevelQuadratic { b1: 0.01, b2: 0.0001 };
    assert!(matches!(optimum_of(&s), Err(Error::NoOptimum(_))));
}

#[test]
fn permanent_growth_response_is_constant() {
    let r = irf(Study::Burke, 40);
    assert!(r[0] < 0.0);
    for x in &r {
        assert!((x - r[0]).abs() <= 1e-12 * r[0].abs());
    }
}

#[test]
fn level_families_vanish_after_last_lag() {
    let last = |s: Study| match spec(s).model {
        Family::LevelQuadratic { .. } => 0,
        Family::LevelInteracted { .. } => 1,
        Family::FiniteImpulse { weights, .. } => weights.len() - 1,
        Family::StateDependentCrr { horizon, .. } => horizon,
        _ => unreachable!(),
    };
    for s in [Study::Newell, Study::Kalkuhl, Study::Acevedo, Study::Nath] {
        let r = irf(s, 40);
        let k = last(s);
        assert!(r[k].abs() > 0.0, "{s}: response at last lag must be non-zero");
        assert!(r[k + 1..].iter().all(|x| *x == 0.0), "{s}: {:?}", &r[k + 1..]);
    }
}

#[test]
fn fir_innovations_driver_vanishes_after_last_horizon() {
    let mut s = spec(Study::Acevedo);
    let Family::FiniteImpulse { driver, weights } = &mut s.model else { unreachable!() };
    *driver = FirDriver::Innovations;
    let n = weights.len();
    // The reversal of the shock one year later is still inside the last horizon.
    let r = impulse_response(&s, 30, T_EVAL).unwrap().response;
    assert!(r[n].abs() > 0.0);
    assert!(r[n + 1..].iter().all(|x| *x == 0.0));
}

#[test]
fn convergence_decays_geometrically() {
    let r = irf(Study::Harding, 30);
    for w in r.windows(2) {
        assert!((w[1] / w[0] - 0.81).abs() < 1e-9);
    }
}

#[test]
fn tfp_solow_decays_below_five_percent() {
    let r = irf(Study::Casey, 400);
    let peak = r.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let k = r.iter().position(|x| x.abs() < 0.5 * peak).unwrap();
    assert!(k < 400);
    assert!(r[r.len() - 1].abs() < 0.05 * peak);
}

#[test]
fn tfp_solow_saving_rate_cancels() {
    let a = spec(Study::Casey);
    let mut b = a.clone();
    if let Family::TfpSolow { saving, .. } = &mut b.model {
        *saving = 0.4;
    }
    let us = UsTempPath { start_year: 2020, level: (0..100).map(|i| 13.0 + 0.05 * f64::from(i)).collect() };
    assert_eq!(run_damage(&a, &us, 2020, 100).unwrap(), run_damage(&b, &us, 2020, 100).unwrap());
}

#[test]
fn adaptation_absorbs_a_permanent_step() {
    let s = spec(Study::Kahn);
    let Family::ArdlAdaptation { window, pos, .. } = &s.model else { unreachable!() };
    let (m, q) = (*window, pos.len());
    let mut level = vec![T_BASE; 60];
    level.extend(vec![T_BASE + 1.0; 120]);
    let us = UsTempPath { start_year: 1960, level };
    let d = run_damage(&s, &us, 2020, 120).unwrap();
    let inc: Vec<f64> = std::iter::once(d.log_gap[0]).chain(d.log_gap.windows(2).map(|w| w[1] - w[0])).collect();
    let peak = inc.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    assert!(peak > 0.0);
    // The trailing-mean driver is exactly zero from year m on; only the
    // distributed lags and the AR tail remain.
    assert!(inc[m + q + 5..].iter().all(|x| x.abs() < 1e-6 * peak));
    let settled = d.log_gap[m + q + 5];
    assert!(d.log_gap[m + q + 5..].iter().all(|g| (g - settled).abs() < 1e-6 * settled.abs()));
}

#[test]
fn kahn_counterfactual_trend_offsets_own_trend() {
    let mut s = spec(Study::Kahn);
    if let Family::ArdlAdaptation { trend, .. } = &mut s.model {
        *trend = 0.02;
    }
    let level: Vec<f64> = (0..200).map(|i| T_BASE + 0.02 * (f64::from(i) - 139.0)).collect();
    let us = UsTempPath { start_year: 1880, level };
    let d = run_damage(&s, &us, 2020, 60).unwrap();
    assert!(d.log_gap.iter().all(|g| g.abs() < 1e-12), "{:?}", &d.log_gap[..5]);
}

#[test]
fn baseline_climate_gives_zero_loss() {
    for s in Study::ALL {
        let d = run_damage(&spec(s), &constant_path(T_BASE, 300), 2020, 250).unwrap();
        assert!(d.log_gap.iter().all(|g| *g == 0.0), "{s}");
    }
}

#[test]
fn grid_outside_temperature_path_is_a_range_error() {
    let us = constant_path(T_BASE, 10);
    assert!(matches!(run_damage(&spec(Study::Burke), &us, 1985, 5), Err(Error::Range { .. })));
    assert!(matches!(run_damage(&spec(Study::Burke), &us, 1995, 10), Err(Error::Range { .. })));
}

#[test]
fn irf_bands_bracket_the_response() {
    for s in Study::ALL {
        let i = impulse_response(&spec(s), 20, T_EVAL).unwrap();
        for h in 0..=20 {
            assert!(i.lo95[h] <= i.response[h] && i.response[h] <= i.hi95[h]);
        }
    }
}

fn quad_families() -> [Study; 4] {
    [Study::Burke, Study::Newell, Study::Harding, Study::Kalkuhl]
}

proptest! {
    #[test]
    fn hotter_constant_climates_lose_more(t in 14.0f64..30.0, dt in 0.05f64..3.0) {
        for s in quad_families() {
            let sp = spec(s);
            let a = run_damage(&sp, &constant_path(t, 60), 2000, 50).unwrap();
            let b = run_damage(&sp, &constant_path(t + dt, 60), 2000, 50).unwrap();
            prop_assert!(b.loss(49) > a.loss(49), "{} at {} + {}", s, t, dt);
        }
    }

    #[test]
    fn marginal_warming_above_optimum_hurts(t in 14.0f64..30.0) {
        for s in quad_families() {
            let sp = spec(s);
            prop_assume!(t > optimum_of(&sp).unwrap());
            let r = impulse_response(&sp, 3, t).unwrap().response;
            prop_assert!(r[0] < 0.0);
        }
    }

    #[test]
    fn ols_recovers_exact_quadratics(c0 in -1.0f64..1.0, c1 in -0.1f64..0.1, c2 in -0.01f64..0.01) {
        let c = [c0, c1, c2];
        let pts: Vec<(f64, f64)> = (0..60).map(|i| { let t = 0.1 * f64::from(i); (t, eval_quad(&c, t)) }).collect();
        let f = fit_ols_quadratic(&pts).unwrap();
        for k in 0..3 {
            prop_assert!((f[k] - c[k]).abs() < 1e-9);
        }
    }
}

/// Best interpolating quadratic over all triples of points with distinct temperatures.
fn vertex_oracle(pts: &[(f64, f64)], tau: f64) -> f64 {
    let mut best = f64::INFINITY;
    let n = pts.len();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let (a, b, c) = (pts[i], pts[j], pts[k]);
                if a.0 == b.0 || a.0 == c.0 || b.0 == c.0 {
                    continue;
                }
                // Lagrange form converted to coefficients.
                let mut coef = [0.0; 3];
                for (p, q, r) in [(a, b, c), (b, a, c), (c, a, b)] {
                    let den = (p.0 - q.0) * (p.0 - r.0);
                    let w = p.1 / den;
                    coef[0] += w * q.0 * r.0;
                    coef[1] -= w * (q.0 + r.0);
                    coef[2] += w;
                }
                best = best.min(pinball_loss(&coef, pts, tau));
            }
        }
    }
    best
}

#[test]
fn quantile_fit_matches_vertex_enumeration() {
    use rand::{Rng, SeedableRng};
    let mut r = rand_chacha::ChaCha12Rng::seed_from_u64(11);
    for _ in 0..5 {
        let pts: Vec<(f64, f64)> = (0..50)
            .map(|_| {
                let t: f64 = r.random_range(0.0..6.0);
                (t, 0.002 * t * t + r.random_range(-0.02..0.02))
            })
            .collect();
        for tau in [0.05, 0.5, 0.95] {
            let got = pinball_loss(&fit_quantile_quadratic(&pts, tau).unwrap(), &pts, tau);
            let want = vertex_oracle(&pts, tau);
            assert!(got <= want * (1.0 + 1e-9) + 1e-15, "tau {tau}: {got} vs {want}");
        }
    }
}

#[test]
fn degenerate_designs_are_fit_errors() {
    let few: Vec<(f64, f64)> = (0..49).map(|i| (f64::from(i), 0.0)).collect();
    assert!(matches!(fit_ols_quadratic(&few), Err(Error::Fit(_))));
    let two: Vec<(f64, f64)> = (0..60).map(|i| (f64::from(i % 2), 0.0)).collect();
    assert!(matches!(fit_damage_surface(&two), Err(Error::Fit(_))));
}
