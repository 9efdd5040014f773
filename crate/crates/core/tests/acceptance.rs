//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use scghg_core::climate::{sample_param_ensemble, ParamDistributions, ReferencePath, EmulatorConfig, DEFAULT_ENSEMBLE_SIZE};
use scghg_core::damages_macro::{impulse_response, load_payloads, optimum_of, run_damage, Family, Study, T_EVAL};
use scghg_core::damages_nonmarket::{fit_quantile_slope, slope_pinball, synth_wildfire_cloud, VslIncome, WildfireParams};
use scghg_core::discounting::{
    calibrate, ce_term_structure, two_good_rate, CalibrationTarget, GrowthDecomposition, RamseyParams, RateMode,
};
use scghg_core::dist::DistSpec;
use scghg_core::feedbacks::{amazon_step, permafrost_step, AmazonState, HazardParams, PermafrostParams, PermafrostState};
use scghg_core::patterns::{rank_gcms, weighted_sum, PatternConfig, UsTempPath};
use scghg_core::scenario::{synth_ensemble, SynthTargets};
use scghg_core::scghg::{
    climate_summary, pair_params, run, write_table, write_trials, source_labels, ModelSetup, NonmarketToggles,
    RunConfig, ScghgEstimate, SharedInputs,
};

type Outcome = Result<String, String>;

fn check(cond: bool, msg: String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg)
    }
}

fn within(label: &str, got: f64, want: f64, tol: f64) -> Result<(), String> {
    check((got - want).abs() <= tol, format!("{label} = {got:.6} not within {tol} of {want}"))
}

fn time_limit(label: &str, t: Duration, limit: f64) -> Result<(), String> {
    check(t.as_secs_f64() < limit, format!("{label} took {:.2}s (limit {limit}s)", t.as_secs_f64()))
}

fn ac1() -> Outcome {
    let t = Instant::now();
    let e = synth_ensemble(10_000, 1, &SynthTargets::default()).map_err(|e| e.to_string())?;
    let el = t.elapsed();
    let n = e.trials.len() as f64;
    let years: Vec<i32> = e.trials[0].years().collect();
    let mean_pop: Vec<f64> = (0..years.len()).map(|k| e.trials.iter().map(|s| s.pop[k]).sum::<f64>() / n).collect();
    let (kmax, peak) = mean_pop.iter().enumerate().fold((0, 0.0), |a, (k, &p)| if p > a.1 { (k, p) } else { a });
    let growth = |y: i32| {
        let k = (y - years[0]) as usize;
        e.trials.iter().map(|s| s.pc_gdp(k) / s.pc_gdp(k - 1) - 1.0).sum::<f64>() / n
    };
    let epoch = |a: i32, b: i32| (a..=b).map(growth).sum::<f64>() / f64::from(b - a + 1);
    let (g1, g2, g3) = (growth(2021), epoch(2030, 2100), epoch(2200, 2300));
    let end = mean_pop[mean_pop.len() - 1];
    check((peak / 392e6 - 1.0).abs() <= 0.02, format!("peak population {peak:.4e}"))?;
    check((years[kmax] - 2150).abs() <= 15, format!("peak year {}", years[kmax]))?;
    check(end < 370e6, format!("2300 population {end:.4e}"))?;
    within("growth 2021", g1, 0.017, 0.001)?;
    within("growth 2030-2100", g2, 0.015, 0.001)?;
    within("growth 2200-2300", g3, 0.010, 0.001)?;
    time_limit("synthesis", el, 10.0)?;
    Ok(format!(
        "peak {:.1}M in {}, 2300 {:.1}M, growth {:.4}/{:.4}/{:.4}, {:.2}s",
        peak / 1e6,
        years[kmax],
        end / 1e6,
        g1,
        g2,
        g3,
        el.as_secs_f64()
    ))
}

fn shared(trials: usize, seed: u64) -> Result<SharedInputs, String> {
    SharedInputs::build(&ModelSetup::default(), trials, seed, load_payloads(None).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())
}

fn ac2() -> Outcome {
    let t = Instant::now();
    let sh = shared(1000, 2)?;
    let s = climate_summary(&sh, 2, 1000).map_err(|e| e.to_string())?;
    let el = t.elapsed();
    within("GMST 2011-2020", s.gmst_2011_2020, 1.16, 0.05)?;
    within("U.S. 2100", s.us_2100, 16.3, 0.3)?;
    within("U.S. warming 2100", s.us_delta_2100, 2.67, 0.3)?;
    time_limit("1000 trials", el, 30.0)?;
    Ok(format!(
        "GMST 2011-2020 {:.3}, U.S. 2100 {:.3} (+{:.3}), {:.2}s",
        s.gmst_2011_2020,
        s.us_2100,
        s.us_delta_2100,
        el.as_secs_f64()
    ))
}

fn ac3() -> Outcome {
    let cfg = PatternConfig::default();
    let table = [("NorESM2-LM", 1.43), ("GFDL-ESM4", 1.50), ("MPI-ESM1-2-HR", 1.62), ("EC-Earth3-Veg", 2.45)];
    let mut sums = Vec::new();
    for (name, want) in table {
        let g = cfg.gcms.iter().find(|g| g.name == name).ok_or(format!("missing {name}"))?;
        let s = weighted_sum(g.tcr, g.ecs, cfg.mean_tcr, cfg.mean_ecs);
        within(name, s, want, 0.03)?;
        sums.push(format!("{s:.3}"));
    }
    let order: Vec<&str> = table.iter().map(|t| t.0).collect();
    let mut perturbations = 0;
    for ft in [0.75, 0.875, 1.0, 1.125, 1.25] {
        for fe in [0.75, 0.875, 1.0, 1.125, 1.25] {
            let r = rank_gcms(&cfg.gcms, cfg.mean_tcr * ft, cfg.mean_ecs * fe);
            let got: Vec<&str> = r.iter().map(|(g, _)| g.name.as_str()).collect();
            check(got == order, format!("order {got:?} at factors ({ft}, {fe})"))?;
            perturbations += 1;
        }
    }
    let params = sample_param_ensemble(DEFAULT_ENSEMBLE_SIZE, 3, &ParamDistributions::default()).map_err(|e| e.to_string())?;
    let pairing = pair_params(&params, &ReferencePath::default(), &EmulatorConfig::default(), &cfg).map_err(|e| e.to_string())?;
    let gs = pairing.group_sizes();
    let sizes: Vec<usize> = order.iter().map(|n| gs.get(n).copied().unwrap_or(0)).collect();
    check(sizes == [560, 559, 559, 559], format!("group sizes {sizes:?}"))?;
    Ok(format!("sums [{}], order stable over {perturbations} mean perturbations, groups {sizes:?}", sums.join(", ")))
}

fn ac4() -> Outcome {
    let dur = DistSpec::new("triangular", &[10.0, 50.0, 250.0]);
    let h = HazardParams { threshold: 1.0, slope: 0.05 };
    let mut r = ChaCha12Rng::seed_from_u64(4);
    let mut worst = 0.0f64;
    let mut dsum = 0.0;
    for _ in 0..10_000 {
        let d = dur.sample(&mut r);
        dsum += d;
        let mut s = AmazonState::new(0.0, d, 183.0);
        let total: f64 = (0..300).map(|k| amazon_step(&mut s, 2030 + k, 2.0, &h)).sum();
        check(s.triggered == Some(2030), "trial did not trigger".into())?;
        worst = worst.max((total / 183.0 - 1.0).abs());
    }
    check(worst <= 1e-9, format!("Amazon release relative error {worst:e}"))?;
    let mean_d = dsum / 10_000.0;
    within("duration mean", mean_d, 103.3, 1.0)?;
    let mut pworst = 0.0f64;
    for _ in 0..1000 {
        let p = PermafrostParams {
            init_stock: r.random_range(500.0..1500.0),
            thaw_rate: r.random_range(0.0..0.003),
            decomp_rate: r.random_range(0.0..0.05),
            ch4_frac: r.random_range(0.0..0.05),
            passive_frac: r.random_range(0.0..0.6),
        };
        let mut s = PermafrostState::new(p);
        for k in 0..300 {
            permafrost_step(&mut s, 1.0 + 0.02 * f64::from(k));
        }
        pworst = pworst.max((s.total() / p.init_stock - 1.0).abs());
    }
    check(pworst <= 1e-9, format!("permafrost mass balance error {pworst:e}"))?;
    Ok(format!("Amazon max rel error {worst:.1e}, duration mean {mean_d:.2}, permafrost max rel error {pworst:.1e}"))
}

fn ac5() -> Outcome {
    let t = Instant::now();
    let mut seen = Vec::new();
    for s in Study::ALL {
        let spec = s.default_spec();
        let r = impulse_response(&spec, 300, T_EVAL).map_err(|e| e.to_string())?.response;
        let peak = r.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        check(peak > 0.0, format!("{s}: zero response"))?;
        let zero_after = |k: usize| r[k + 1..].iter().all(|x| *x == 0.0) && r[k] != 0.0;
        let what = match &spec.model {
            Family::PermanentGrowth { .. } => {
                check(r.iter().all(|x| (x - r[0]).abs() <= 1e-12 * r[0].abs()), format!("{s}: not constant"))?;
                "constant"
            }
            Family::LevelQuadratic { .. } => {
                check(zero_after(0), format!("{s}: non-zero after lag 0"))?;
                "zero after lag 0"
            }
            Family::LevelInteracted { .. } => {
                check(zero_after(1), format!("{s}: non-zero after lag 1"))?;
                "zero after lag 1"
            }
            Family::FiniteImpulse { weights, .. } => {
                check(zero_after(weights.len() - 1), format!("{s}: non-zero after last lag"))?;
                "zero after last lag"
            }
            Family::StateDependentCrr { horizon, .. } => {
                check(zero_after(*horizon), format!("{s}: non-zero after horizon"))?;
                "zero after horizon"
            }
            Family::Convergence { .. } => {
                check(r.windows(2).take(60).all(|w| (w[1] / w[0] - 0.81).abs() < 1e-9), format!("{s}: ratio"))?;
                "ratio 0.81"
            }
            Family::TfpSolow { .. } => {
                let half = r.iter().position(|x| x.abs() < 0.5 * peak).ok_or(format!("{s}: no half-life"))?;
                let five = r.iter().rposition(|x| x.abs() >= 0.05 * peak).map_or(0, |k| k + 1);
                check(five < r.len(), format!("{s}: does not fall below 5% of peak"))?;
                seen.push(format!("{s}: half-life {half}y, <5% from {five}y"));
                continue;
            }
            Family::ArdlAdaptation { window, pos, .. } => {
                let (m, q) = (*window, pos.len());
                let mut level = vec![T_EVAL; 80];
                level.extend(vec![T_EVAL + 1.0; 200]);
                let us = UsTempPath { start_year: 1940, level };
                let d = run_damage(&spec.with_t_base(T_EVAL), &us, 2020, 200).map_err(|e| e.to_string())?;
                let inc: Vec<f64> =
                    std::iter::once(d.log_gap[0]).chain(d.log_gap.windows(2).map(|w| w[1] - w[0])).collect();
                let p = inc.iter().fold(0.0f64, |a, x| a.max(x.abs()));
                let tail = inc[m..].iter().skip(q + 5).fold(0.0f64, |a, x| a.max(x.abs()));
                check(p > 0.0 && tail < 1e-6 * p, format!("{s}: incremental damage {tail:e} after m={m}"))?;
                seen.push(format!("{s}: step absorbed after m={m} (+{q} lags)"));
                continue;
            }
        };
        seen.push(format!("{s}: {what}"));
    }
    time_limit("suite", t.elapsed(), 5.0)?;
    Ok(format!("{} families; {}", Study::ALL.len(), seen.join("; ")))
}

fn ac6() -> Outcome {
    let mut got = Vec::new();
    for (s, want) in [(Study::Kalkuhl, 5.4), (Study::Nath, 13.0), (Study::Harding, 13.2), (Study::Acevedo, 13.0)] {
        let o = optimum_of(&s.default_spec()).map_err(|e| e.to_string())?;
        within(s.as_str(), o, want, 1e-9)?;
        got.push(format!("{s} {o:.4}"));
    }
    Ok(got.join(", "))
}

/// Exhaustive search over candidate ratios; ties resolve to the smaller slope.
fn slope_oracle(pts: &[(f64, f64)], tau: f64) -> f64 {
    let mut best: Option<(f64, f64)> = None;
    for &(x, y) in pts.iter().filter(|p| p.0 != 0.0) {
        let b = y / x;
        let l = slope_pinball(pts, b, tau);
        best = match best {
            None => Some((b, l)),
            Some((bb, bl)) => {
                let tol = 1e-12 * bl.abs().max(l.abs());
                if l < bl - tol || ((l - bl).abs() <= tol && b < bb) {
                    Some((b, l))
                } else {
                    Some((bb, bl))
                }
            }
        }
    }
    best.expect("non-zero regressor").0
}

fn ac7() -> Outcome {
    let mut r = ChaCha12Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let n = r.random_range(2..=50);
        let slope = r.random_range(-2.0..2.0);
        let pts: Vec<(f64, f64)> = (0..n)
            .map(|_| {
                let x = if r.random_bool(0.85) { r.random_range(0.01..3.0) } else { r.random_range(-1.0..0.0) };
                (x, slope * x + r.random_range(-1.0..1.0))
            })
            .collect();
        let tau = r.random_range(0.02..0.98);
        let got = fit_quantile_slope(&pts, tau).map_err(|e| e.to_string())?;
        let want = slope_oracle(&pts, tau);
        worst = worst.max((got - want).abs() / want.abs().max(1.0));
    }
    check(worst <= 1e-12, format!("max slope discrepancy {worst:e}"))?;
    let cloud = synth_wildfire_cloud(2024, &WildfireParams::default());
    let q: Vec<f64> = [0.25, 0.5, 0.75].iter().map(|&t| fit_quantile_slope(&cloud, t)).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
    check(cloud.len() == 252, format!("cloud has {} points", cloud.len()))?;
    check(q[0] < q[1] && q[1] < q[2], format!("slopes {q:?} not increasing"))?;
    Ok(format!(
        "1000 instances, max discrepancy {worst:.1e}; cloud slopes {:.2e} < {:.2e} < {:.2e}",
        q[0], q[1], q[2]
    ))
}

fn ac8() -> Outcome {
    let mut r = ChaCha12Rng::seed_from_u64(8);
    let (mut e12, mut e13) = (0.0f64, 0.0f64);
    for _ in 0..10_000 {
        let eta = loop {
            let e: f64 = r.random_range(0.1..3.0);
            if (e - 1.0).abs() > 1e-3 {
                break e;
            }
        };
        let rho = r.random_range(0.0..0.03);
        let d = GrowthDecomposition {
            g0: r.random_range(-0.02..0.05),
            dg_c: r.random_range(-0.01..0.01),
            dg_e: r.random_range(-0.01..0.01),
        };
        let b12 = two_good_rate(&d, &RamseyParams { rho, eta, alpha: 0.0 }, RateMode::B12).map_err(|e| e.to_string())?;
        let b10a = two_good_rate(&d, &RamseyParams { rho, eta, alpha: eta / (eta - 1.0) }, RateMode::B10).map_err(|e| e.to_string())?;
        let b13 = two_good_rate(&d, &RamseyParams { rho, eta, alpha: 0.0 }, RateMode::B13).map_err(|e| e.to_string())?;
        let b10z = two_good_rate(&d, &RamseyParams { rho, eta, alpha: 0.0 }, RateMode::B10).map_err(|e| e.to_string())?;
        e12 = e12.max((b10a - b12).abs());
        e13 = e13.max((b10z - b13).abs());
    }
    check(e12 <= 1e-12 && e13 <= 1e-12, format!("reduction errors {e12:e}, {e13:e}"))?;
    let p = RamseyParams::default();
    for _ in 0..1000 {
        let (a, b): (f64, f64) = (r.random_range(-0.01..0.04), r.random_range(-0.01..0.04));
        if (a - b).abs() < 1e-3 {
            continue;
        }
        let ce = ce_term_structure(&[vec![a; 300], vec![b; 300]], &p, 300).map_err(|e| e.to_string())?;
        check(ce.windows(2).all(|w| w[1] < w[0]), format!("CE rate not strictly declining for growth {a}, {b}"))?;
    }
    let e = synth_ensemble(2000, 8, &SynthTargets::default()).map_err(|e| e.to_string())?;
    let g: Vec<Vec<f64>> = e.trials.iter().map(|t| (1..t.len()).map(|i| t.pc_gdp(i) / t.pc_gdp(i - 1) - 1.0).collect()).collect();
    let c = calibrate(&g, &CalibrationTarget::default()).map_err(|e| e.to_string())?;
    let (rho, eta) = (c.params.rho, c.params.eta);
    check((0.002..=0.007).contains(&rho) && (0.9..=1.2).contains(&eta), format!("calibrated ({rho:.5}, {eta:.4})"))?;
    check(c.near_residual.abs() < 1e-8 && c.far_residual.abs() < 1e-8, "calibration residuals".into())?;
    Ok(format!("reductions {e12:.1e}/{e13:.1e}; CE declining; calibrated rho {:.3}% eta {eta:.3}", rho * 100.0))
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

fn ac9() -> Outcome {
    let t = Instant::now();
    let n = 2000;
    let sh = shared(n, 9)?;
    let go = |c: &RunConfig| run(&sh, c).map_err(|e| e.to_string());
    let one = |c: &RunConfig| -> Result<ScghgEstimate, String> { Ok(go(c)?.estimates.remove(0)) };
    let base = RunConfig { trials: n, seed: 9, studies: vec![], nonmarket: NonmarketToggles::default(), ..Default::default() };

    let zero = one(&base)?;
    check(zero.total == 0.0 && zero.market == 0.0 && zero.nonmarket == 0.0, format!("zero-damage SC {}", zero.total))?;

    let mut add_err = 0.0f64;
    for studies in [vec![], vec![Study::Nath]] {
        let with = |nm: &str| one(&RunConfig { studies: studies.clone(), nonmarket: NonmarketToggles::parse(nm).unwrap(), ..base.clone() });
        let all = with("all")?;
        let market = with("none")?.total;
        let parts: f64 = ["mortality", "wildfire", "biodiversity"]
            .iter()
            .map(|s| with(s).map(|e| e.total - market))
            .sum::<Result<f64, String>>()?;
        add_err = add_err.max(rel(market + parts, all.total));
    }
    check(add_err <= 1e-9, format!("source additivity error {add_err:e}"))?;

    let lin_cfg = RunConfig { studies: vec![Study::Nath], nonmarket: NonmarketToggles::all(), ..base.clone() };
    let full = one(&lin_cfg)?.total;
    let half = one(&RunConfig { pulse_size: 0.5, ..lin_cfg.clone() })?.total;
    let lin = rel(half, full);
    check(lin < 0.01, format!("pulse linearity {lin:e}"))?;

    let m = go(&RunConfig { studies: vec![Study::Burke, Study::Newell], ..base.clone() })?;
    let ratio = m.estimates[0].total / m.estimates[1].total;
    check(ratio > 10.0, format!("Burke/Newell ratio {ratio:.2}"))?;

    let all = RunConfig { studies: Study::ALL.to_vec(), nonmarket: NonmarketToggles::all(), ..base.clone() };
    let mut row_err = 0.0f64;
    for mode in [scghg_core::scghg::Mode::Independent, scghg_core::scghg::Mode::Integrated] {
        for e in go(&RunConfig { mode, ..all.clone() })?.estimates {
            row_err = row_err.max(rel(e.market + e.nonmarket, e.total));
        }
    }
    check(row_err <= 1e-12, format!("market + nonmarket != total ({row_err:e})"))?;

    let study = RunConfig { studies: vec![Study::Nath], nonmarket: NonmarketToggles::all(), ..base.clone() };
    let exo = one(&RunConfig { vsl_income: Some(VslIncome::Exogenous), rate_mode: Some(RateMode::B13), ..study.clone() })?;
    let net = one(&RunConfig { vsl_income: Some(VslIncome::NetOfMacro), rate_mode: Some(RateMode::B13), ..study.clone() })?;
    let b12 = one(&RunConfig { vsl_income: Some(VslIncome::Exogenous), rate_mode: Some(RateMode::B12), ..study.clone() })?;
    let health = |e: &ScghgEstimate| e.mortality + e.wildfire;
    check(health(&net) < health(&exo), format!("net-of-macro VSL health {} vs {}", health(&net), health(&exo)))?;
    check(b12.total > exo.total, format!("netted discounting total {} vs {}", b12.total, exo.total))?;
    let el = t.elapsed();
    time_limit("suite", el, 120.0)?;
    Ok(format!(
        "additivity {add_err:.1e}, linearity {:.2e}, Burke/Newell {ratio:.1}, rows {row_err:.1e}, health {:.2} -> {:.2}, total {:.2} -> {:.2}, {:.1}s",
        lin,
        health(&exo),
        health(&net),
        exo.total,
        b12.total,
        el.as_secs_f64()
    ))
}

fn ac10() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cfg = RunConfig { trials: 300, seed: 10, studies: vec![Study::Burke, Study::Nath], ..Default::default() };
    let mut files = Vec::new();
    for threads in [1, 4] {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(|e| e.to_string())?;
        let (table, trials) = pool.install(|| -> Result<(Vec<u8>, Vec<u8>), String> {
            let sh = shared(cfg.trials, cfg.seed)?;
            let r = run(&sh, &cfg).map_err(|e| e.to_string())?;
            let (mut a, mut b) = (Vec::new(), Vec::new());
            write_table(&r, &mut a, false).map_err(|e| e.to_string())?;
            write_trials(&r, &source_labels(&cfg), &mut b).map_err(|e| e.to_string())?;
            Ok((a, b))
        })?;
        for (name, bytes) in [("scghg", table), ("trials", trials)] {
            let p = dir.path().join(format!("{name}-{threads}.csv"));
            std::fs::write(&p, bytes).map_err(|e| e.to_string())?;
            files.push(p);
        }
    }
    let read = |i: usize| std::fs::read(&files[i]).unwrap();
    check(read(0) == read(2), "summary tables differ".into())?;
    check(read(1) == read(3), "trial tables differ".into())?;
    Ok(format!("1 vs 4 threads: {} + {} bytes identical", read(0).len(), read(1).len()))
}

fn main() {
    let suite: [(&str, fn() -> Outcome); 10] = [
        ("scenario calibration", ac1),
        ("climate anchors", ac2),
        ("pattern module", ac3),
        ("feedback conservation", ac4),
        ("persistence taxonomy", ac5),
        ("quadratic optima", ac6),
        ("quantile regression oracle", ac7),
        ("discounting identities", ac8),
        ("SC-GHG structural suite", ac9),
        ("determinism", ac10),
    ];
    let mut failed = 0;
    for (i, (name, f)) in suite.iter().enumerate() {
        let t = Instant::now();
        let out = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        match out {
            Ok(d) => println!("AC{:<2} PASS {name} ({secs:.2}s): {d}", i + 1),
            Err(d) => {
                failed += 1;
                println!("AC{:<2} FAIL {name} ({secs:.2}s): {d}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", suite.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
