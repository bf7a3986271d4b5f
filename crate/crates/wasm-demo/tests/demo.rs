use fverify_wasm::{analysis_json_impl, convert_odds_impl, reliability_svg_impl};

#[test]
fn svg_has_band_only_when_asked() {
    let with = reliability_svg_impl(400, -0.3, 1.2, "beta:2,2", 1, true).unwrap();
    let without = reliability_svg_impl(400, -0.3, 1.2, "beta:2,2", 1, false).unwrap();
    assert!(with.starts_with("<?xml") && with.trim_end().ends_with("</svg>"));
    assert!(with.contains("<polygon"));
    assert!(!without.contains("<polygon"));
}

#[test]
fn analysis_reconstructs_the_score() {
    let v: serde_json::Value =
        serde_json::from_str(&analysis_json_impl(500, 0.0, 1.0, "uniform:0.1,0.9", 4).unwrap()).unwrap();
    let cr = &v["CR"];
    let rebuilt = cr["REL"].as_f64().unwrap() - cr["RES"].as_f64().unwrap() + cr["UNC"].as_f64().unwrap();
    assert!((rebuilt - v["brier"].as_f64().unwrap()).abs() < 1e-12);
    assert!(v["cox"]["beta"].as_f64().is_some());
}

#[test]
fn odds_conversion_and_errors() {
    let p = convert_odds_impl(2.0, 3.0, 4.0).unwrap();
    assert!((p[0] - 0.461538).abs() < 1e-6);
    assert!((p[..3].iter().sum::<f64>() - 1.0).abs() < 1e-12);
    assert!((p[3] - (0.5 + 1.0 / 3.0 + 0.25 - 1.0)).abs() < 1e-12);
    assert!(convert_odds_impl(1.0, 3.0, 4.0).is_err());
    assert!(reliability_svg_impl(10, 0.0, 1.0, "beta:0,2", 1, true).is_err());
}
