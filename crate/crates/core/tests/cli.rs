use std::path::Path;
use std::process::{Command, Output};

use boole_pf::report::{RunReport, Table};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_boole-pf"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_to(dir: &Path, name: &str, args: &[&str]) -> (Output, std::path::PathBuf) {
    let path = dir.join(name);
    let mut full: Vec<&str> = args.to_vec();
    let p = path.to_str().unwrap().to_string();
    full.extend(["--out", &p]);
    let out = bin(&full);
    (out, path)
}

fn json_report(path: &Path) -> RunReport {
    RunReport::from_json(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn csv_table(path: &Path) -> Table {
    Table::read_csv(std::fs::File::open(path).unwrap()).unwrap()
}

#[test]
fn iterate_params_csv_and_json_agree() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["iterate-params", "--alpha", "0.5", "--nu0", "1", "--gamma0", "1", "--steps", "3"];
    let (o1, json) = run_to(dir.path(), "r.json", &[&args[..], &["--format", "json"]].concat());
    let (o2, csv) = run_to(dir.path(), "r.csv", &[&args[..], &["--format", "csv"]].concat());
    assert!(o1.status.success() && o2.status.success());
    let report = json_report(&json);
    let table = csv_table(&csv);
    assert_eq!(report.records, table);
    assert_eq!(table.len(), 4);
    assert_eq!(table.rows[0][1..3], [Some(1.0), Some(1.0)]);
    assert_eq!(table.rows[1][1..3], [Some(0.25), Some(0.75)]);
    let factor = 1.0 - 4.0 * 0.5625 / (1.0 + 0.0625 + 0.5625_f64).powi(2);
    assert!((table.rows[1][5].unwrap() - factor).abs() < 1e-15);
}

#[test]
fn json_report_layout() {
    let out = bin(&["iterate-params", "--steps", "2", "--seed", "9"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    for key in ["config", "records", "oracles", "meta"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["meta"]["seed"], 9);
    assert_eq!(v["meta"]["version"], env!("CARGO_PKG_VERSION"));
    assert!(v["meta"]["wall_time_s"].as_f64().unwrap() >= 0.0);
    assert_eq!(v["config"]["command"], "iterate-params");
    assert_eq!(v["config"]["steps"], 2);
}

#[test]
fn fixed_point_rows_are_constant() {
    let out = bin(&["iterate-params", "--nu0", "0", "--gamma0", "1", "--steps", "4", "--format", "csv"]);
    assert!(out.status.success());
    let t = Table::read_csv(out.stdout.as_slice()).unwrap();
    assert!(t.rows.iter().all(|r| r[1] == Some(0.0) && r[2] == Some(1.0)));
}

#[test]
fn invalid_alpha_is_rejected() {
    let out = bin(&["iterate-params", "--alpha", "1.5"]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("--alpha") && err.contains("1.5"), "{err}");
    assert!(out.stdout.is_empty());
}

#[test]
fn missing_output_directory_is_rejected() {
    let out = bin(&["iterate-params", "--out", "/definitely/not/here/r.json"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("--out"));
}

#[test]
fn verify_pf_defaults_pass_and_encodings_agree() {
    let dir = tempfile::tempdir().unwrap();
    let (o1, json) = run_to(dir.path(), "pf.json", &["verify-pf"]);
    let (o2, csv) = run_to(dir.path(), "pf.csv", &["verify-pf", "--format", "csv"]);
    assert!(o1.status.success(), "{}", String::from_utf8_lossy(&o1.stderr));
    assert!(o2.status.success());
    let report = json_report(&json);
    assert_eq!(report.records, csv_table(&csv));
    assert_eq!(report.records.len(), 2);
    assert!(report.meta.passed);
    let nu = report.oracle("fitted_nu").unwrap().value.unwrap();
    let gamma = report.oracle("fitted_gamma").unwrap().value.unwrap();
    assert!((nu - 0.25).abs() < 0.01 && (gamma - 0.75).abs() < 0.01);
}

#[test]
fn verify_pf_stationary_input() {
    let out = bin(&["verify-pf", "--nu0", "0", "--gamma0", "1", "--n", "20000"]);
    assert!(out.status.success());
    let r = RunReport::from_json(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    assert!(r.oracle("closed_form_sup_error").unwrap().value.unwrap() < 1e-12);
}

#[test]
fn coarse_grid_warns() {
    let out = bin(&["verify-pf", "--grid-size", "8", "--n", "20000"]);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("warning") && err.contains("under-resolved"), "{err}");
    let r = RunReport::from_json(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    assert!(r.oracle("grid_mass_drift").unwrap().value.unwrap() > 1e-3);
}

#[test]
fn geometry_at_one_one_and_at_the_degenerate_point() {
    let out = bin(&["geometry"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = RunReport::from_json(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    let factor = r.oracle("conformal_factor").unwrap().value.unwrap();
    assert!((factor - 5.0 / 9.0).abs() < 1e-15);
    assert_eq!(r.records.len(), 26);

    let out = bin(&["geometry", "--nu0", "0", "--gamma0", "1"]);
    let r = RunReport::from_json(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    assert_eq!(r.oracle("conformal_factor").unwrap().value, Some(0.0));
    assert_eq!(r.records.column("degenerate").unwrap()[0], Some(1.0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("degenerate"));
}

#[test]
fn orbit_trace_and_ks() {
    let out = bin(&["orbit", "--steps", "5", "--n", "100000", "--format", "csv"]);
    assert!(out.status.success());
    let t = Table::read_csv(out.stdout.as_slice()).unwrap();
    assert_eq!(t.len(), 6);
    assert_eq!(t.rows[0][1], Some(std::f64::consts::SQRT_2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("PASS ks_distance"), "{err}");
}

#[test]
fn orbit_into_the_pole_is_truncated() {
    let out = bin(&["orbit", "--xi0", "1", "--steps", "3"]);
    assert_eq!(out.status.code(), Some(1));
    let r = RunReport::from_json(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    assert_eq!(r.records.column("xi").unwrap(), vec![Some(1.0), Some(0.0)]);
    assert!(r.meta.warnings.iter().any(|w| w.contains("truncated")));
}

#[test]
fn negative_flag_values_parse() {
    let out = bin(&["iterate-params", "--nu0", "-3", "--gamma0", "0.5", "--alpha", "0.9", "--steps", "1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
