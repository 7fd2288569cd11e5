use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_magsteklov")).args(args).output().expect("binary runs")
}

fn run_to(dir: &Path, file: &str, args: &[&str]) -> (Output, String) {
    let path = dir.join(file);
    let mut full: Vec<&str> = args.to_vec();
    let path_str = path.to_str().unwrap().to_owned();
    full.extend(["--out", &path_str]);
    let out = run(&full);
    let body = std::fs::read_to_string(&path).unwrap_or_default();
    (out, body)
}

fn csv_rows(body: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut reader = csv::Reader::from_reader(body.as_bytes());
    let header = reader.headers().unwrap().iter().map(str::to_owned).collect();
    let rows = reader.records().map(|r| r.unwrap().iter().map(str::to_owned).collect()).collect();
    (header, rows)
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn curves_default_grid_has_606_rows_per_branch() {
    let dir = tempfile::tempdir().unwrap();
    let (out, body) = run_to(dir.path(), "curves.csv", &["curves"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(!body.contains('\r'));
    let (header, rows) = csv_rows(&body);
    assert_eq!(header, ["n", "b", "lambda", "branch"]);
    assert_eq!(rows.iter().filter(|r| r[3] == "pos").count(), 606);
    assert_eq!(rows.iter().filter(|r| r[3] == "neg").count(), 606);
    for r in &rows {
        assert!(num(&r[2]) >= 0.0, "{r:?}");
        if num(&r[1]) == 0.0 {
            assert_eq!(num(&r[2]), num(&r[0]));
        }
    }
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("curves.csv.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["schema_version"], 1);
    assert_eq!(meta["rows"], 1212);
}

#[test]
fn floats_carry_17_significant_digits() {
    let out = run(&["curves", "--n-max", "1", "--steps", "3"]);
    let (_, rows) = csv_rows(&String::from_utf8(out.stdout).unwrap());
    for r in rows {
        let mantissa = r[2].split('e').next().unwrap();
        assert_eq!(mantissa.chars().filter(char::is_ascii_digit).count(), 17, "{}", r[2]);
    }
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    for cmd in ["curves", "envelope", "intersections"] {
        let (_, first) = run_to(dir.path(), "a.csv", &[cmd]);
        let meta_a = std::fs::read(dir.path().join("a.csv.meta.json")).unwrap();
        let (_, second) = run_to(dir.path(), "b.csv", &[cmd]);
        let meta_b = std::fs::read(dir.path().join("b.csv.meta.json")).unwrap();
        assert!(!first.is_empty());
        assert_eq!(first, second, "{cmd}");
        assert_eq!(meta_a, meta_b, "{cmd}");
    }
}

#[test]
fn envelope_is_increasing_with_monotone_modes() {
    let out = run(&["envelope", "--b-max", "30", "--steps", "301"]);
    assert!(out.status.success());
    let (header, rows) = csv_rows(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(header, ["b", "active_mode", "lambda_dn", "asymptote"]);
    assert_eq!(rows.len(), 301);
    for w in rows.windows(2) {
        assert!(num(&w[1][2]) > num(&w[0][2]));
        let (m0, m1): (u32, u32) = (w[0][1].parse().unwrap(), w[1][1].parse().unwrap());
        assert!(m1 == m0 || m1 == m0 + 1);
    }
}

#[test]
fn intersections_satisfy_crossing_identity() {
    let out = run(&["intersections", "--n-max", "20"]);
    let (header, rows) = csv_rows(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(header, ["n", "z_n", "lambda_at_zn", "beta_n", "residual_M", "residual_F"]);
    assert_eq!(rows.len(), 21);
    assert!(rows[0][3].is_empty());
    for r in &rows {
        let (n, z) = (num(&r[0]), num(&r[1]));
        assert!(z > n + 1.0);
        assert!((num(&r[2]) - (z - n - 1.0)).abs() <= 1e-8);
        assert!(num(&r[5]) <= 1e-8);
    }
}

#[test]
fn constants_json_has_schema_and_passing_checks() {
    let out = run(&["constants"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["schema_version"], 1);
    for key in ["alpha", "xi0", "theta0", "delta_alpha", "u0_sq_at_0", "comparison_bound"] {
        assert!(doc[key].is_f64(), "{key}");
    }
    let checks = doc["checks"].as_object().unwrap();
    assert!(checks.contains_key("f_formula_max_residual") && checks.contains_key("phi_prime_alpha"));
    assert!(checks.values().all(|c| c["passed"] == true));
    let alpha = doc["alpha"].as_f64().unwrap();
    assert!((doc["theta0"].as_f64().unwrap() - doc["xi0"].as_f64().unwrap().powi(2)).abs() < 1e-15);
    assert!(alpha < doc["comparison_bound"].as_f64().unwrap());
}

#[test]
fn constants_csv_flattens_checks() {
    let out = run(&["constants", "--format", "csv"]);
    assert!(out.status.success());
    let (header, rows) = csv_rows(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(header, ["key", "value"]);
    assert!(rows.iter().any(|r| r[0] == "checks.phi_prime_alpha.value"));
}

#[test]
fn json_tables_mirror_csv_rows() {
    let out = run(&["curves", "--n-max", "2", "--steps", "4", "--format", "json"]);
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["schema_version"], 1);
    assert_eq!(doc["rows"].as_array().unwrap().len(), 24);
    assert_eq!(doc["rows"][0]["branch"], "pos");
}

#[test]
fn halfplane_and_degennes_sweeps() {
    let (_, hp) = csv_rows(&String::from_utf8(run(&["halfplane"]).stdout).unwrap());
    assert_eq!(hp.len(), 121);
    // the sweep minimum of f1 sits at alpha
    let least = hp.iter().map(|r| num(&r[1])).fold(f64::INFINITY, f64::min);
    assert!(least > 0.76 && least < 0.77, "{least}");
    let out = run(&["degennes", "--steps", "16"]);
    let (header, dg) = csv_rows(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(header, ["xi", "f"]);
    assert_eq!(dg.len(), 16);
    assert!(num(&dg[0][1]) > 0.0 && num(&dg[15][1]) < 0.0);
}

#[test]
fn verify_only_runs_one_suite() {
    let out = run(&["verify", "--only", "specfun"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().filter(|l| l.starts_with("PASS") || l.starts_with("FAIL")).collect();
    assert!(!lines.is_empty());
    assert!(lines.iter().all(|l| l.split_whitespace().nth(1) == Some("specfun")));
}

#[test]
fn verify_json_lists_outcomes() {
    let out = run(&["verify", "--only", "numerics", "--format", "json"]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(doc["outcomes"].as_array().unwrap().iter().all(|o| o["suite"] == "numerics"));
}

#[test]
fn tight_tolerance_either_passes_or_names_failures() {
    let out = run(&["verify", "--only", "models", "--rel-tol", "1e-15"]);
    match out.status.code() {
        Some(0) => {}
        Some(1) => assert!(String::from_utf8_lossy(&out.stderr).contains("checks failed: models/")),
        other => panic!("unexpected exit {other:?}"),
    }
}

#[test]
fn configuration_errors_exit_with_2() {
    for args in [
        vec!["curves", "--steps", "1"],
        vec!["curves", "--n-min", "5", "--n-max", "2"],
        vec!["envelope", "--b-min", "3", "--b-max", "1"],
        vec!["envelope", "--b-min", "-1"],
        vec!["verify", "--only", "bogus"],
        vec!["curves", "--only", "specfun"],
        vec!["curves", "--rel-tol", "0"],
        vec!["curves", "--format", "xml"],
        vec!["nonsense"],
    ] {
        assert_eq!(run(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn unwritable_output_exits_with_1() {
    let out = run(&["curves", "--steps", "2", "--out", "/nonexistent-dir/x.csv"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn envelope_tracks_asymptote_at_large_field() {
    let out = run(&["envelope", "--b-min", "9999", "--b-max", "10000", "--steps", "2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (_, rows) = csv_rows(&String::from_utf8(out.stdout).unwrap());
    let last = rows.last().unwrap();
    assert_eq!(num(&last[0]), 10_000.0);
    assert!((num(&last[2]) - num(&last[3])).abs() <= 0.05);
}
