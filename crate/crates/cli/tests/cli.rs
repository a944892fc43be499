use std::process::{Command, Output};

use rfqho_core::transform::Grid;
use serde_json::Value;

fn rfqho(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rfqho")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = rfqho(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&stdout(args)).unwrap()
}

fn grid(args: &[&str]) -> Grid {
    Grid::from_csv(&stdout(args)).unwrap()
}

#[test]
fn hermite_symbolic_rows() {
    let rows = json(&["hermite", "--n", "2"]);
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[2]["terms"].as_array().unwrap().len(), 2);
    assert_eq!(rows[2]["display"], "4·|k|^(α) - α·|k|^(α/2-1)");

    let ground = json(&["hermite", "--n", "0"]);
    assert_eq!(ground[0]["display"], "1");
}

#[test]
fn hermite_specialized_exponents() {
    let rows = json(&["hermite", "--n", "4", "--alpha", "3/2"]);
    let exps: Vec<&str> =
        rows[4]["terms"].as_array().unwrap().iter().map(|t| t["exponent"].as_str().unwrap()).collect();
    assert_eq!(exps, ["3", "5/4", "-1/2", "-9/4"]);
}

#[test]
fn hermite_csv() {
    let text = stdout(&["hermite", "--n", "1", "--format", "csv"]);
    assert_eq!(text, "n,coeff,sgn,j,m\n0,1,0,0,0\n1,2,1,1,0\n");
}

#[test]
fn k_space_states() {
    let g = grid(&["state", "--n", "0", "--alpha", "1", "--grid", "0:1:2"]);
    assert!((g.values()[1].re - (-2.0f64 / 3.0).exp()).abs() < 1e-15);

    let g = grid(&["state", "--n", "1", "--alpha", "2", "--grid", "-1:1:3"]);
    assert!((g.values()[2].im - 2.0 * (-0.5f64).exp()).abs() < 1e-15);
    assert!(g.values().iter().all(|v| v.re == 0.0));
}

#[test]
fn singular_origin_is_omitted() {
    let g = grid(&["state", "--n", "2", "--alpha", "1", "--grid", "-1:1:3"]);
    assert_eq!(g.points(), [-1.0, 1.0]);
}

#[test]
fn x_space_gaussian() {
    let g = grid(&["state", "--n", "0", "--alpha", "2", "--space", "x", "--grid", "-1:1:3"]);
    assert!((g.values()[1].re - (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-12);
}

#[test]
fn eigenvalues() {
    let g = grid(&["eigenvalue", "--n", "0", "--alpha", "2", "--grid", "-3:3:7"]);
    assert!(g.values().iter().all(|v| (v.re - 0.5).abs() < 1e-15 && v.im == 0.0));

    let g = grid(&["eigenvalue", "--n", "0", "--alpha", "1", "--grid", "2:4:2"]);
    assert!((g.values()[1].re - 0.25).abs() < 1e-15);

    let g = grid(&["eigenvalue", "--n", "0", "--alpha", "1", "--theta", "1", "--grid", "0:1:2"]);
    let v = g.values().last().unwrap();
    assert!((v.re + 0.5).abs() < 1e-15 && (v.im - 1.0).abs() < 1e-15);
}

#[test]
fn factorize_equal_indices() {
    let v = json(&["factorize", "--delta", "2", "--gamma", "2"]);
    assert_eq!(v["epsilon_alpha"]["display"], "1/2");
    let v = json(&["factorize", "--delta", "3/2", "--gamma", "3/2"]);
    assert_eq!(v["epsilon_alpha"]["display"], "1/2·D^(-1/4)");
}

#[test]
fn factorize_opposite_x_terms() {
    let v = json(&["factorize", "--delta", "1", "--gamma", "2"]);
    let x_words = |key: &str| -> Vec<(String, String)> {
        v[key]["words"]
            .as_array()
            .unwrap()
            .iter()
            .filter(|w| w["xpow"] == 1)
            .map(|w| (w["coeff"].as_str().unwrap().to_string(), w["dorder"].as_str().unwrap().to_string()))
            .collect()
    };
    let forward = x_words("epsilon_gamma_delta");
    let reverted = x_words("epsilon_delta_gamma");
    assert_eq!(forward.len(), 2);
    for (c, d) in &forward {
        let (rc, _) = reverted.iter().find(|(_, rd)| rd == d).unwrap();
        assert_eq!(rc.trim_start_matches('-'), c.trim_start_matches('-'));
        assert_ne!(rc.starts_with('-'), c.starts_with('-'));
    }
}

#[test]
fn factorize_k_space() {
    let text = stdout(&["factorize", "--delta", "2", "--gamma", "2", "--space", "k", "--format", "csv"]);
    assert_eq!(
        text,
        "operator,kind,re,im,sgn,order\nepsilon_gamma_delta,multiplier,-1,0,0,0\nepsilon_alpha,multiplier,-1/2,0,0,0\n"
    );
}

#[test]
fn nongauss_k() {
    let g = grid(&["nongauss", "--alpha", "2", "--grid", "-2:2:9"]);
    assert!(g.values().iter().all(|v| v.re == 0.0));
}

#[test]
fn validate_passes_with_informational_items() {
    let out = rfqho(&["validate"]);
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    let results = report["results"].as_array().unwrap();
    assert!(results.iter().all(|r| r["status"] != "fail"));
    for id in ["h4_coefficient", "theta_one_term"] {
        let r = results.iter().find(|r| r["id"] == id).unwrap();
        assert_eq!(r["status"], "informational");
    }
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["state", "--alpha", "1.5"][..],
        &["state", "--alpha", "1/0"],
        &["state", "--alpha", "1", "--grid", "1:0:5"],
        &["state", "--alpha", "1", "--grid", "0:1:1"],
        &["state", "--alpha", "1", "--grid", "0:1"],
        &["hermite", "--n", "21"],
        &["factorize", "--delta", "0", "--gamma", "1"],
        &["bogus"],
    ] {
        assert_eq!(rfqho(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn output_is_deterministic() {
    let args = ["state", "--n", "1", "--alpha", "3/2", "--space", "x", "--grid", "-3:3:31"];
    assert_eq!(stdout(&args), stdout(&args));
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("phi.csv");
    let args = ["state", "--alpha", "1", "--grid", "-2:2:5"];
    let mut with_out: Vec<&str> = args.to_vec();
    let p = path.to_str().unwrap();
    with_out.extend(["--out", p]);
    assert!(stdout(&with_out).is_empty());
    let written = std::fs::read_to_string(&path).unwrap();
    assert_eq!(written, stdout(&args));
    let g = Grid::from_csv(&written).unwrap();
    assert_eq!(g.to_csv(), written);
}

#[test]
fn json_grid_format() {
    let v = json(&["state", "--alpha", "2", "--grid", "0:1:2", "--format", "json"]);
    assert_eq!(v["axis"], "k");
    assert_eq!(v["re"][0], 1.0);
}
