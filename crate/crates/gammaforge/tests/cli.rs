mod common;

use std::fs;

use serde_json::Value;
use tempfile::TempDir;

use common::*;

#[test]
fn reconstruct_sphere_report() {
    let dir = TempDir::new().unwrap();
    let spec = catalog_spec(dir.path(), "sphere2_spherical");
    write(dir.path(), "pts.json", "[[1.0, 0.3], [2.0, -1.0], [0.5, 2.5]]");
    let out = run(dir.path(), &["reconstruct", "--spec", spec.to_str().unwrap(), "--points", "pts.json"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = stdout_json(&out);
    let reports = v["reports"].as_array().unwrap();
    assert_eq!(reports.len(), 3);
    for r in reports {
        for key in ["point", "cometric", "metric", "christoffels", "ric_mu", "drift_Z", "diagnostics"] {
            assert!(r.get(key).is_some(), "missing {key}");
        }
        let d = &r["diagnostics"];
        assert!(f(&d["koszul_crosscheck"]) <= 1e-8);
        assert!(f(&d["bochner_residual"]) <= 1e-8);
        // co-metric diag(1, 1/sin²θ)
        assert!((f(&d["min_eig"]) - 1.0).abs() <= 1e-12);
        // Ric_μ = g on the unit sphere with uniform density
        let theta = f(&r["point"][0]);
        assert!((f(&r["ric_mu"][1][1]) - theta.sin().powi(2)).abs() <= 1e-7);
        assert_eq!(r["christoffels"].as_array().unwrap().len(), 2);
    }
    assert_eq!(v["meta"]["within_tolerance"], Value::Bool(true));
}

#[test]
fn flat_spec_has_zero_christoffels() {
    let dir = TempDir::new().unwrap();
    let spec = catalog_spec(dir.path(), "euclidean3");
    let out = run(dir.path(), &["reconstruct", "--spec", spec.to_str().unwrap(), "--box", "-1:1,-1:1,-1:1", "--grid", "2"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = stdout_json(&out);
    assert_eq!(v["reports"].as_array().unwrap().len(), 8);
    for r in v["reports"].as_array().unwrap() {
        assert_eq!(max_abs(&r["christoffels"]), 0.0);
        assert_eq!(max_abs(&r["ric_mu"]), 0.0);
    }
}

#[test]
fn ou_sign_is_resolved_and_recorded() {
    let dir = TempDir::new().unwrap();
    let spec = catalog_spec(dir.path(), "ou_gaussian2");
    let out = run(dir.path(), &["reconstruct", "--spec", spec.to_str().unwrap(), "--box", "-1:1,-1:1", "--grid", "3"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let sign = &stdout_json(&out)["meta"]["bochner_sign"];
    assert_eq!(sign["source"], "resolved");
    assert_eq!(f(&sign["value"]), -1.0);
    assert!(f(&sign["residual_minus"]) <= 1e-8);
    assert!(f(&sign["residual_plus"]) >= 1e-2);

    // forcing the losing sign breaches the Bochner tolerance
    let out = run(
        dir.path(),
        &["reconstruct", "--spec", spec.to_str().unwrap(), "--box", "-1:1,-1:1", "--grid", "3", "--bochner-sign", "+1"],
    );
    assert_eq!(code(&out), 4);
    assert_eq!(stdout_json(&out)["meta"]["bochner_sign"]["source"], "flag");
}

#[test]
fn non_gradient_drift_exits_3() {
    let dir = TempDir::new().unwrap();
    write(
        dir.path(),
        "rot.json",
        r#"{"dim": 2, "chart": "plane", "cometric": [["1", "0"], ["0", "1"]], "drift": ["-x2", "x1"], "weighted_form": null}"#,
    );
    write(dir.path(), "pts.json", "[[0.5, 0.5]]");
    let out = run(dir.path(), &["reconstruct", "--spec", "rot.json", "--points", "pts.json"]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("no invariant density"), "{}", stderr(&out));
}

#[test]
fn degenerate_cometric_exits_3() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "deg.json", r#"{"dim": 1, "cometric": [["x1^2"]], "drift": ["0"]}"#);
    write(dir.path(), "pts.json", "[[0.0]]");
    let out = run(dir.path(), &["reconstruct", "--spec", "deg.json", "--points", "pts.json"]);
    assert_eq!(code(&out), 3, "{}", stderr(&out));
    assert!(stderr(&out).contains("not positive definite"));
}

#[test]
fn input_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let spec = catalog_spec(dir.path(), "euclidean2");
    let spec = spec.to_str().unwrap();
    write(dir.path(), "pts.json", "[[0.0, 0.0]]");
    write(dir.path(), "bad.json", r#"{"dim": 1, "cometric": [["1 +"]], "drift": ["0"]}"#);
    write(dir.path(), "unknown.json", r#"{"dim": 1, "cometric": [["y"]], "drift": ["0"]}"#);
    write(dir.path(), "shape.json", r#"{"dim": 2, "cometric": [["1"]], "drift": ["0", "0"]}"#);
    write(dir.path(), "notjson.json", "{");
    write(dir.path(), "pts3.json", "[[0.0, 0.0, 0.0]]");
    let cases: Vec<Vec<&str>> = vec![
        vec!["reconstruct", "--spec", "bad.json", "--points", "pts.json"],
        vec!["reconstruct", "--spec", "unknown.json", "--points", "pts.json"],
        vec!["reconstruct", "--spec", "shape.json", "--points", "pts.json"],
        vec!["reconstruct", "--spec", "notjson.json", "--points", "pts.json"],
        vec!["reconstruct", "--spec", "missing.json", "--points", "pts.json"],
        vec!["reconstruct", "--spec", spec, "--points", "pts3.json"],
        vec!["reconstruct", "--spec", spec],
        vec!["reconstruct", "--spec", spec, "--points", "pts.json", "--jet-order", "5"],
        vec!["reconstruct", "--spec", spec, "--points", "pts.json", "--tol", "0"],
        vec!["reconstruct", "--spec", spec, "--points", "pts.json", "--bochner-sign", "2"],
        vec!["reconstruct", "--spec", spec, "--points", "pts.json", "--frobnicate"],
        vec!["reconstruct", "--spec", spec, "--box", "1:0,0:1"],
        vec!["verify", "--catalog", "klein_bottle"],
        vec!["frobnicate"],
    ];
    for args in cases {
        let out = run(dir.path(), &args);
        assert_eq!(code(&out), 2, "{args:?}: {}", stderr(&out));
    }
}

#[test]
fn verify_flat_and_sphere() {
    let dir = TempDir::new().unwrap();
    let out = run(dir.path(), &["verify", "--catalog", "euclidean2"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = stdout_json(&out);
    assert_eq!(v["samples"], 50);
    for (k, d) in v["deviations"].as_object().unwrap() {
        assert!(f(d) <= 1e-11, "{k}: {d}");
    }

    let out = run(dir.path(), &["verify", "--catalog", "sphere2_spherical", "--out", "cmp.json"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = json(&dir.path().join("cmp.json"));
    assert!(f(&v["deviations"]["ricci_mu"]) <= 1e-7);
    assert_eq!(v["within_tolerance"], Value::Bool(true));
}

#[test]
fn verify_catches_a_scaled_cometric() {
    let dir = TempDir::new().unwrap();
    let path = catalog_spec(dir.path(), "sphere2_spherical");
    let mut spec: Value = json(&path);
    for row in spec["cometric"].as_array_mut().unwrap() {
        for c in row.as_array_mut().unwrap() {
            *c = Value::String(format!("1.01*({})", c.as_str().unwrap()));
        }
    }
    fs::write(&path, spec.to_string()).unwrap();
    let out = run(
        dir.path(),
        &["verify", "--catalog", "sphere2_spherical", "--spec", path.to_str().unwrap(), "--samples", "20"],
    );
    assert_eq!(code(&out), 4);
    // g scales by 1/1.01 and g_11 = 1 on the sphere
    let metric = f(&stdout_json(&out)["deviations"]["metric"]);
    assert!((metric - (1.0 - 1.0 / 1.01)).abs() <= 1e-12, "{metric}");
}

#[test]
fn semigroup_circle_series() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "circle.json", CIRCLE);
    let out = run(
        dir.path(),
        &["semigroup", "--spec", "circle.json", "--box", TWO_PI_BOX, "--grid", "256", "--out", "run"],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let csv = fs::read_to_string(dir.path().join("run/series.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,H,I,residual"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|c| c.parse::<f64>().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 40);
    for w in rows.windows(2) {
        assert!(w[1][0] > w[0][0]);
        assert!(w[1][2] <= w[0][2] + 1e-10, "I increased: {w:?}");
        assert!(w[1][1] >= w[0][1] - 1e-10, "H decreased: {w:?}");
    }
    for r in &rows {
        assert!((r[1] + r[2] - std::f64::consts::LN_2).abs() <= 1e-12);
    }
    let summary = json(&dir.path().join("run/summary.json"));
    assert_eq!(summary["mi_monotone"], Value::Bool(true));
    assert_eq!(summary["entropy_direction"], "nondecreasing");
    assert_eq!(f(&summary["dissipation"]["sign"]), 1.0);
    assert!(f(&summary["dissipation"]["relative_residual"]) <= 1e-2);
    assert_eq!(summary["refinement"], Value::Null);

    let limit = json(&dir.path().join("run/gamma_limit.json"));
    assert_eq!(limit["t"].as_array().unwrap().len(), 4);
    for r in limit["ratio"].as_array().unwrap() {
        assert!((1.7..=2.3).contains(&f(r)), "{r}");
    }
    assert!(f(&limit["extrapolated_sup_error"]) <= 0.01);
}

#[test]
fn semigroup_constant_probe_and_refinement() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "circle.json", CIRCLE);
    let out = run(
        dir.path(),
        &[
            "semigroup", "--spec", "circle.json", "--box", TWO_PI_BOX, "--grid", "256", "--times", "0.05,0.1,0.2",
            "--probe", "3", "--refine", "--out", "run",
        ],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let limit = json(&dir.path().join("run/gamma_limit.json"));
    assert_eq!(max_abs(&limit["sup_error"]), 0.0);
    assert_eq!(f(&limit["extrapolated_sup"]), 0.0);
    // 0/0 ratios serialize as null
    assert!(limit["ratio"].as_array().unwrap().iter().all(Value::is_null));

    let refinement = &json(&dir.path().join("run/summary.json"))["refinement"];
    let rows = refinement["rows"].as_array().unwrap();
    assert_eq!(rows[0]["points_per_axis"], 256);
    assert_eq!(rows[1]["points_per_axis"], 512);
    assert!(f(&rows[1]["dt"]) <= f(&rows[0]["dt"]) / 2.0);
    assert!(f(&refinement["improvement"]) >= 2.0);
    assert!(f(&rows[1]["relative_residual"]) * 2.0 <= f(&rows[0]["relative_residual"]));
}

#[test]
fn semigroup_rejects_unsupported_shapes() {
    let dir = TempDir::new().unwrap();
    write(
        dir.path(),
        "aniso.json",
        r#"{"dim": 2, "cometric": [["1", "0.1"], ["0.1", "1"]], "drift": ["0", "0"],
            "weighted_form": {"metric": [["1", "-0.1"], ["-0.1", "1"]], "log_density": "0"}}"#,
    );
    write(dir.path(), "bare.json", r#"{"dim": 1, "cometric": [["1"]], "drift": ["0"]}"#);
    for (spec, b) in [("aniso.json", "0:1,0:1"), ("bare.json", "0:1")] {
        let out = run(dir.path(), &["semigroup", "--spec", spec, "--box", b, "--grid", "16", "--out", "run"]);
        assert_eq!(code(&out), 2, "{spec}: {}", stderr(&out));
        assert!(stderr(&out).contains("unsupported"), "{}", stderr(&out));
    }
    let e3 = catalog_spec(dir.path(), "euclidean3");
    let out = run(dir.path(), &["semigroup", "--spec", e3.to_str().unwrap(), "--box", "0:1,0:1,0:1", "--out", "run"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn isometry_verdicts() {
    let dir = TempDir::new().unwrap();
    let hp = catalog_spec(dir.path(), "hyperbolic_halfplane");
    let flat = catalog_spec(dir.path(), "euclidean2");
    let (hp, flat) = (hp.to_str().unwrap(), flat.to_str().unwrap());
    write(dir.path(), "affine.json", r#"{"components": ["2*x1 + 1", "2*x2"]}"#);
    write(dir.path(), "id.json", r#"["x1", "x2"]"#);
    write(dir.path(), "fold.json", r#"["x1", "0*x2"]"#);
    write(dir.path(), "pts.json", "[[0.0, 1.0], [0.5, 2.0], [-1.0, 0.7], [1.5, 3.5]]");

    let out = run(dir.path(), &["isometry", "--spec", hp, "--spec-b", hp, "--map", "affine.json", "--points", "pts.json"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = stdout_json(&out);
    assert_eq!(v["verdict"], "isometry");
    assert!(f(&v["max_gamma_residual"]) <= 1e-9 && f(&v["max_metric_residual"]) <= 1e-9);

    let out = run(dir.path(), &["isometry", "--spec", hp, "--spec-b", hp, "--map", "id.json", "--points", "pts.json"]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(max_abs(&v["gamma_residuals"]) + max_abs(&v["metric_pullback_residuals"]), 0.0);
    assert_eq!(f(&v["measure_ratio_variation"]), 0.0);

    let out = run(dir.path(), &["isometry", "--spec", flat, "--spec-b", hp, "--map", "id.json", "--points", "pts.json"]);
    assert_eq!(code(&out), 4);
    let v = stdout_json(&out);
    assert_eq!(v["verdict"], "non-isometry");
    assert!(f(&v["max_metric_residual"]) >= 0.1);

    let out = run(dir.path(), &["isometry", "--spec", flat, "--spec-b", flat, "--map", "fold.json", "--points", "pts.json"]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("singular"));

    let out = run(dir.path(), &["isometry", "--spec", flat, "--spec-b", flat, "--points", "pts.json"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn output_is_deterministic_and_seeded() {
    let dir = TempDir::new().unwrap();
    let spec = catalog_spec(dir.path(), "torus_conformal");
    let args = ["reconstruct", "--spec", spec.to_str().unwrap(), "--box", "0:6,0:6", "--grid", "2"];
    let a = run(dir.path(), &args);
    let b = run(dir.path(), &args);
    assert_eq!(code(&a), 0, "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);

    let seeded = |seed: &str| {
        std::process::Command::new(env!("CARGO_BIN_EXE_gammaforge"))
            .args(args)
            .current_dir(dir.path())
            .env("GAMMAFORGE_SEED", seed)
            .output()
            .unwrap()
    };
    let s1 = seeded("11");
    assert_eq!(s1.stdout, seeded("11").stdout);
    let v = stdout_json(&s1);
    assert_eq!(v["meta"]["seed"], 11);
    assert_ne!(s1.stdout, a.stdout);
    assert_eq!(code(&seeded("eleven")), 2);

    write(dir.path(), "circle.json", CIRCLE);
    for run_dir in ["s1", "s2"] {
        let out = run(
            dir.path(),
            &["semigroup", "--spec", "circle.json", "--box", TWO_PI_BOX, "--grid", "64", "--tol", "1", "--out", run_dir],
        );
        assert_eq!(code(&out), 0, "{}", stderr(&out));
    }
    for file in ["series.csv", "gamma_limit.json", "summary.json"] {
        let a = fs::read(dir.path().join("s1").join(file)).unwrap();
        assert_eq!(a, fs::read(dir.path().join("s2").join(file)).unwrap(), "{file}");
    }
}

#[test]
fn config_file_with_flags_winning() {
    let dir = TempDir::new().unwrap();
    fs::create_dir(dir.path().join("cfg")).unwrap();
    catalog_spec(&dir.path().join("cfg"), "hyperbolic_halfplane");
    write(dir.path(), "cfg/pts.json", "[[0.0, 1.0], [1.0, 2.0]]");
    write(
        dir.path(),
        "cfg/run.json",
        r#"{"spec": "hyperbolic_halfplane.json", "points": "pts.json", "tol": 1e-6, "bochner_sign": "+1", "seed": 5}"#,
    );
    let out = run(dir.path(), &["reconstruct", "--config", "cfg/run.json"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let meta = stdout_json(&out)["meta"].clone();
    assert_eq!(f(&meta["tolerance"]), 1e-6);
    assert_eq!(meta["bochner_sign"]["source"], "flag");
    assert_eq!(f(&meta["bochner_sign"]["value"]), 1.0);
    assert_eq!(meta["seed"], 5);

    let out = run(dir.path(), &["reconstruct", "--config", "cfg/run.json", "--tol", "1e-4", "--bochner-sign", "-1"]);
    let meta = stdout_json(&out)["meta"].clone();
    assert_eq!(f(&meta["tolerance"]), 1e-4);
    assert_eq!(f(&meta["bochner_sign"]["value"]), -1.0);

    write(dir.path(), "cfg/typo.json", r#"{"spec": "hyperbolic_halfplane.json", "tolerance": 1e-6}"#);
    assert_eq!(code(&run(dir.path(), &["reconstruct", "--config", "cfg/typo.json"])), 2);
}

#[test]
fn floats_carry_17_significant_digits() {
    let dir = TempDir::new().unwrap();
    let spec = catalog_spec(dir.path(), "sphere2_stereographic");
    write(dir.path(), "pts.json", "[[0.3, -0.7]]");
    let out = run(dir.path(), &["reconstruct", "--spec", spec.to_str().unwrap(), "--points", "pts.json"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut floats = 0;
    for token in text.split(|c: char| c.is_whitespace() || c == ',' || c == '[' || c == ']') {
        if token.contains('e') && token.chars().next().is_some_and(|c| c == '-' || c.is_ascii_digit()) {
            let mantissa = token.trim_start_matches('-').split('e').next().unwrap();
            assert_eq!(mantissa.len(), 18, "{token}");
            assert_eq!(mantissa.as_bytes()[1], b'.');
            floats += 1;
        }
    }
    assert!(floats > 20);
}

#[test]
fn export_round_trips() {
    let dir = TempDir::new().unwrap();
    let out = run(dir.path(), &["export", "--catalog", "torus_conformal", "--out", "torus.json"]);
    assert_eq!(code(&out), 0);
    let v = json(&dir.path().join("torus.json"));
    assert_eq!(v["truth"]["name"], "torus_conformal");
    assert_eq!(v["truth"]["christoffels"].as_array().unwrap().len(), 2);
    // the exported file verifies against its own catalog entry
    let out = run(dir.path(), &["verify", "--catalog", "torus_conformal", "--spec", "torus.json", "--samples", "5"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(f(&stdout_json(&out)["deviations"]["ricci_mu"]) <= 1e-7);
}
