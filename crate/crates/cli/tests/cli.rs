use std::f64::consts::PI;
use std::process::{Command, Output};

use serde_json::Value;

fn wvlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wvlab"))
        .args(args)
        .env_remove("WVLAB_THREADS")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let mut full = args.to_vec();
    full.extend(["--format", "json"]);
    let out = wvlab(&full);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn col(doc: &Value, name: &str) -> usize {
    doc["columns"]
        .as_array()
        .unwrap()
        .iter()
        .position(|c| c == name)
        .unwrap_or_else(|| panic!("no column {name}"))
}

fn num(row: &Value, k: usize) -> f64 {
    row[k].as_f64().unwrap_or(f64::NAN)
}

#[test]
fn tradeoff_golden_row() {
    let doc = json(&["tradeoff", "--alpha", "170deg", "--fb", "0.1"]);
    let row = &doc["rows"][0];
    let expect = [
        ("g_min_ii", 0.5247, 1e-4),
        ("g_min_i", 3.035, 1e-3),
        ("d_min_ii", 0.0633, 1e-4),
        ("d_min_i", 0.4875, 1e-4),
        ("p_ap", 0.0076, 1e-4),
        ("p_f", 0.071, 1e-3),
    ];
    for (name, value, tol) in expect {
        let got = num(row, col(&doc, name));
        assert!((got - value).abs() <= tol, "{name}: {got}");
    }
}

#[test]
fn fig1_weak_coupling_follows_weak_value() {
    let doc = json(&["fig1", "--alpha", "0:2pi:181", "--g-over-delta", "0.001"]);
    let (ka, ke) = (col(&doc, "alpha"), col(&doc, "exact(g=0.001)"));
    let mut checked = 0;
    for row in doc["rows"].as_array().unwrap() {
        let alpha = num(row, ka);
        // Near alpha = pi the weak value diverges and the finite-coupling
        // curve turns over, so the comparison excludes that window.
        if (alpha - PI).abs() < 0.3 {
            continue;
        }
        let exact = num(row, ke);
        assert!((exact - (alpha / 2.0).tan()).abs() <= 1e-4, "alpha={alpha} exact={exact}");
        checked += 1;
    }
    assert!(checked > 150);
}

#[test]
fn fig2b_limits() {
    let doc = json(&["fig2b", "--alpha", "0:2pi:91", "--g-over-delta", "0.001,10"]);
    let (ki, kw0, kw1, ks) = (
        col(&doc, "initial"),
        col(&doc, "weak(g=0.001)"),
        col(&doc, "weak(g=10)"),
        col(&doc, "strong"),
    );
    for row in doc["rows"].as_array().unwrap() {
        let (i, w0, w1, s) = (num(row, ki), num(row, kw0), num(row, kw1), num(row, ks));
        assert!((w0 - i).abs() < 1e-6);
        assert!(w1 >= s - 1e-12 && w1 - s < 1e-12);
        assert!(w0 >= w1 - 1e-12);
    }
}

#[test]
fn fig2b_strong_coupling_gap_near_pi() {
    let doc = json(&["fig2b", "--alpha-prime", "0", "--alpha", "0.9pi:1.1pi:41", "--g-over-delta", "3,10"]);
    let (k3, k10, ks) = (col(&doc, "weak(g=3)"), col(&doc, "weak(g=10)"), col(&doc, "strong"));
    let row = &doc["rows"][20];
    // Orthogonal preparations: the only surviving term is 2 e^{-g^2/2}.
    assert!((num(row, k3) - (-4.5f64).exp()).abs() < 1e-15);
    for row in doc["rows"].as_array().unwrap() {
        let gap = num(row, k10) - num(row, ks);
        assert!(gap.abs() < 1e-15, "{gap}");
    }
}

#[test]
fn output_is_deterministic_across_thread_counts() {
    let args = ["fig3", "--alpha", "0:2pi:61", "--g-over-delta", "0.5,2"];
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_wvlab"))
            .args(args)
            .env("WVLAB_THREADS", threads)
            .output()
            .unwrap()
    };
    let a = run("1");
    let b = run("3");
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, run("1").stdout);
}

#[test]
fn csv_layout_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig5.csv");
    let out = wvlab(&["fig5", "--fb", "0.1,0.5", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# wvlab "));
    assert_eq!(lines[1], "# command: fig5");
    let header = lines.iter().find(|l| !l.starts_with('#')).unwrap();
    assert!(header.starts_with("f_b,g_min_i,g_min_ii(alpha=0.3pi),d_min_i(alpha=0.3pi),d_min_ii(alpha=0.3pi)"));
    let data: Vec<&str> = lines.iter().filter(|l| !l.starts_with('#')).skip(1).copied().collect();
    assert_eq!(data.len(), 2);
    for l in data {
        assert_eq!(l.split(',').count(), header.split(',').count());
    }
}

#[test]
fn json_schema() {
    let doc = json(&["sweep", "--alpha", "0.3pi,-0.5pi", "--beta", "0", "--g-over-delta", "0,1"]);
    assert_eq!(doc["meta"]["schema_version"], 1);
    assert_eq!(doc["meta"]["command"], "sweep");
    assert_eq!(doc["meta"]["parameters"]["alpha"], "0.3pi,-0.5pi");
    let width = doc["columns"].as_array().unwrap().len();
    let rows = doc["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r.as_array().unwrap().len() == width));
    // The shift-over-coupling ratio is undefined at zero coupling.
    let k = col(&doc, "exact");
    assert!(rows[0][k].is_null());
    assert!(rows[1][k].is_number());
}

#[test]
fn oracle_column() {
    let doc = json(&["sweep", "--alpha", "0.3pi,0.9pi", "--beta", "0,-0.2pi", "--g-over-delta", "0.5,2", "--oracle", "on"]);
    let k = col(&doc, "oracle_max_dev");
    for row in doc["rows"].as_array().unwrap() {
        assert!(num(row, k) < 1e-6);
    }
    let off = json(&["sweep", "--alpha", "0.3pi"]);
    assert!(off["columns"].as_array().unwrap().iter().all(|c| c != "oracle_max_dev"));
}

#[test]
fn verify_small_lattice_passes() {
    let out = wvlab(&["verify", "--alpha", "0.3pi", "--g-over-delta", "1", "--beta", "0", "--points", "1024"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("alpha,g_over_delta,beta,quantity")));
    assert!(!text.contains(",false"));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec!["fig1", "--alpha", "twelve"],
        vec!["fig1", "--alpha", "0:1:1"],
        vec!["fig1", "--g-over-delta", "0"],
        vec!["fig5", "--fb", "1.5"],
        vec!["tradeoff", "--format", "xml"],
        vec!["fig2b", "--alpha-prime", "0,1"],
        vec!["nosuch"],
    ] {
        let out = wvlab(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
    let out = Command::new(env!("CARGO_BIN_EXE_wvlab"))
        .arg("tradeoff")
        .env("WVLAB_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
