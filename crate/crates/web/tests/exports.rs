use scghg_web::{damage_curve_json, irf_json, term_structure_json};

fn parse(s: &str) -> serde_json::Value {
    serde_json::from_str(s).unwrap()
}

fn floats(v: &serde_json::Value) -> Vec<f64> {
    v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

#[test]
fn irf_has_requested_length() {
    let v = parse(&irf_json("harding", 25, 16.3).unwrap());
    assert_eq!(floats(&v["response"]).len(), 26);
    assert!(irf_json("nobody", 5, 16.3).is_err());
}

#[test]
fn damage_curve_starts_at_zero_and_grows() {
    for s in ["burke", "newell", "kahn"] {
        let v = parse(&damage_curve_json(s, 4.0, 8).unwrap());
        let loss = floats(&v["loss"]);
        assert_eq!(loss.len(), 9);
        assert_eq!(loss[0], 0.0, "{s}");
        assert!(loss[8] > loss[4] && loss[4] > 0.0, "{s}: {loss:?}");
    }
    assert!(damage_curve_json("burke", -1.0, 8).is_err());
}

#[test]
fn uncertain_growth_gives_a_declining_term_structure() {
    let r = floats(&parse(&term_structure_json(0.002, 1.2, 0.015, 0.01, 50, 300).unwrap())["rates"]);
    assert_eq!(r.len(), 300);
    assert!(r.windows(2).all(|w| w[1] <= w[0] + 1e-15));
    assert!(r[299] < r[0]);
    let flat = floats(&parse(&term_structure_json(0.002, 1.2, 0.015, 0.0, 5, 50).unwrap())["rates"]);
    assert!(flat.iter().all(|x| (x - flat[0]).abs() < 1e-12));
}
