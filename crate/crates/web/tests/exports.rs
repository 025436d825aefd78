use isolab_web::{forest_json, hzero_json, isoperimetry_json, layout};
use serde_json::json;

#[test]
fn free_group_minimizer_and_profile() {
    let v = isoperimetry_json("F2", "", 3, 5).unwrap();
    assert_eq!(v["minimizer"]["ratio"]["num"], 12);
    assert_eq!(v["minimizer"]["ratio"]["den"], 5);
    assert_eq!(v["profile"][1]["ratio"]["num"], 12);
    assert_eq!(v["growth"], 3.0);
    let labels = v["ball"]["labels"].as_array().unwrap();
    assert_eq!(labels.len(), 53);
    assert_eq!(labels[0], "1");
}

#[test]
fn custom_generators_are_accepted() {
    let v = isoperimetry_json("Z", "a,aa", 2, 3).unwrap();
    assert_eq!(v["ball"]["labels"].as_array().unwrap().len(), 9);
}

#[test]
fn budget_overrun_is_reported_inline() {
    let v = isoperimetry_json("Z^2", "", 12, 40).unwrap();
    assert!(v["minimizer"]["error"].is_string());
}

#[test]
fn errors_are_messages() {
    assert!(isoperimetry_json("G7", "", 2, 3).is_err());
    assert!(forest_json("F2", "", 3, "loose", 10, 1).is_err());
    assert!(isoperimetry_json("F3", "", 12, 3).is_err());
}

#[test]
fn layouts_stay_in_the_unit_square() {
    for (group, r) in [("F2", 4), ("Z^2", 5), ("Zmod5^2", 3), ("(Z) x (Zmod3)", 3)] {
        let v = isoperimetry_json(group, "", r, 2).unwrap();
        let pos = v["ball"]["pos"].as_array().unwrap();
        assert_eq!(pos[0], json!([0.0, 0.0]), "{group}");
        for p in pos {
            let (x, y) = (p[0].as_f64().unwrap(), p[1].as_f64().unwrap());
            assert!(x.abs() <= 1.0 + 1e-12 && y.abs() <= 1.0 + 1e-12, "{group}");
        }
    }
}

#[test]
fn tree_layout_separates_vertices() {
    let spec = isolab_core::groups::parse_group_spec("F2").unwrap();
    let gens = isolab_core::groups::GeneratingSet::standard(&spec);
    let ball = isolab_core::groups::cayley_ball(&spec, &gens, 4).unwrap();
    let pos = layout(&ball);
    for i in 0..pos.len() {
        for j in 0..i {
            let d = (pos[i][0] - pos[j][0]).hypot(pos[i][1] - pos[j][1]);
            assert!(d > 1e-6, "{i} and {j} coincide");
        }
    }
}

#[test]
fn forest_on_free_group() {
    let v = forest_json("F2", "", 3, "free", 200, 42).unwrap();
    assert_eq!(v["beta1_estimate"], 1.0);
    assert_eq!(v["center_degree"], 4);
    // A spanning tree of B(3) in F2 is the ball itself.
    assert_eq!(v["forest"].as_array().unwrap().len(), 52);
    let trace = v["harmonic_trace"].as_f64().unwrap();
    assert!((trace - 1.0).abs() < 0.1);
}

#[test]
fn wired_forest_is_deterministic() {
    let a = forest_json("Z^2", "", 4, "wired", 300, 7).unwrap();
    let b = forest_json("Z^2", "", 4, "wired", 300, 7).unwrap();
    assert_eq!(a, b);
    assert_eq!(a["mode"], "wired");
}

#[test]
fn hzero_values() {
    let v = hzero_json(1000, 10, 0.01).unwrap();
    assert_eq!(v["cost"]["num"], 101);
    assert_eq!(v["cost"]["den"], 100);
    assert!(v["witness_ratio"]["value"].as_f64().unwrap() <= 4.0 / 11.0);
    assert_eq!(v["holds"], true);
    assert_eq!(v["segment_property"], true);
    assert_eq!(v["psi"].as_array().unwrap().len(), 10);
    assert!(hzero_json(10_000, 10, 0.01).unwrap()["psi"].is_null());
    assert!(hzero_json(10, 10, 0.01).is_err());
}
