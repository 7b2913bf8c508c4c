use std::path::Path;
use std::process::Command;

use lipcheck::cli::run;
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lipcheck"))
}

fn exit_code(args: &[&str]) -> i32 {
    bin().args(args).output().unwrap().status.code().unwrap()
}

fn run_to(args: &[&str], out: &Path) -> i32 {
    let mut v = vec!["lipcheck"];
    v.extend_from_slice(args);
    let out = out.to_str().unwrap();
    v.extend_from_slice(&["--out", out]);
    run(v)
}

#[test]
fn check_exit_codes() {
    let base = ["check", "--oracle", "saddle_half_diff", "--space", "linf", "--budget", "2000"];
    let mut ok = base.to_vec();
    ok.extend_from_slice(&["--condition", "one_sided_lip", "--L", "1"]);
    assert_eq!(exit_code(&ok), 0);
    let mut bad = base.to_vec();
    bad.extend_from_slice(&["--condition", "lip_gradient", "--L", "1"]);
    assert_eq!(exit_code(&bad), 1);
    assert_eq!(
        exit_code(&["check", "--oracle", "half_sq_norm", "--space", "euclidean", "--condition", "all", "--L", "1", "--budget", "500"]),
        0
    );
}

#[test]
fn violation_report_carries_witness_on_antidiagonal() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let code = run_to(
        &["check", "--oracle", "saddle_half_diff", "--space", "linf", "--condition", "lip_gradient", "--L", "1"],
        &out,
    );
    assert_eq!(code, 1);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let w = &v["verdicts"][0]["witness"];
    let d: Vec<f64> = (0..2)
        .map(|i| w["y"][i].as_f64().unwrap() - w["x"][i].as_f64().unwrap())
        .collect();
    assert!(d[0] * d[1] < 0.0);
    assert!((d[0].abs() - d[1].abs()).abs() < 0.1 * d[0].abs());
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(exit_code(&["gallery", "unknown_name"]), 2);
    assert_eq!(exit_code(&["frobnicate"]), 2);
    assert_eq!(exit_code(&["check", "--oracle", "nope", "--L", "1"]), 2);
    assert_eq!(exit_code(&["check", "--oracle", "half_sq_norm", "--condition", "bogus", "--L", "1"]), 2);
    assert_eq!(exit_code(&["check", "--oracle", "half_sq_norm"]), 2);
    assert_eq!(
        exit_code(&["check", "--oracle", "half_sq_norm", "--space", "linf", "--condition", "nonexpansive_transform", "--L", "1"]),
        2
    );
    assert_eq!(exit_code(&["estimate", "--config", "/nonexistent/config.json"]), 2);
    assert_eq!(exit_code(&["--help"]), 0);
}

#[test]
fn gallery_exit_codes() {
    assert_eq!(exit_code(&["gallery", "banach_theorem_failure"]), 0);
    assert_eq!(exit_code(&["gallery", "--budget", "2000"]), 0);
}

#[test]
fn estimate_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("e.json");
    assert_eq!(run_to(&["estimate", "--oracle", "quadratic:1,0;0,3", "--space", "euclidean"], &out), 0);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let est = v["estimates"].as_array().unwrap();
    assert_eq!(est.len(), 10);
    for e in est {
        let l = e["L_hat"].as_f64().unwrap();
        assert!((l - 3.0).abs() < 0.05 * 3.0, "{e}");
    }
    for key in ["oracle", "space", "domain", "estimates", "matrix", "seed", "budget"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }

    assert_eq!(run_to(&["estimate", "--oracle", "linear:1,-2"], &out), 0);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    for e in v["estimates"].as_array().unwrap() {
        assert_eq!(e["L_hat"].as_f64(), Some(0.0));
        assert_eq!(e["degenerate"].as_bool(), Some(true));
    }

    assert_eq!(
        run_to(&["estimate", "--oracle", "half_sq_norm", "--space", "linf", "--dim", "2", "--condition", "lip_gradient"], &out),
        0
    );
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!((v["estimates"][0]["L_hat"].as_f64().unwrap() - 2.0).abs() < 1e-3);
}

#[test]
fn unbounded_estimates_serialize_as_null() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("u.json");
    let code = run_to(
        &["estimate", "--oracle", "saddle_half_diff", "--space", "linf", "--condition", "cocoercivity", "--budget", "100"],
        &out,
    );
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(v["estimates"][0]["L_hat"].is_null());
    assert_eq!(v["estimates"][0]["unbounded"].as_bool(), Some(true));
}

#[test]
fn matrix_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("m.json");
    assert_eq!(run_to(&["matrix", "--oracle", "quadratic:1,0;0,3", "--budget", "3000"], &out), 0);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["matrix"]["space_class"], "hilbert");
    assert!(v["matrix"]["entries"]
        .as_array()
        .unwrap()
        .iter()
        .all(|e| e["status"] == "verified"));
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["estimate", "--oracle", "softplus_norm", "--space", "lp:3", "--dim", "3", "--domain", "ball:2", "--budget", "1500", "--seed", "17"];
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    assert_eq!(run_to(&args, &a), 0);
    assert_eq!(run_to(&args, &b), 0);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn config_file_and_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"oracle":{"name":"saddle_half_diff"},"space":{"dim":2,"norm":"linf"},
            "conditions":["lip_gradient"],"L":[1.0],"budget":1000,"seed":3}"#,
    )
    .unwrap();
    let c = cfg.to_str().unwrap();
    assert_eq!(exit_code(&["check", "--config", c]), 1);
    assert_eq!(exit_code(&["check", "--config", c, "--L", "2"]), 0);
}

fn csv_values(text: &str, record: &str) -> Vec<Option<f64>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let headers = r.headers().unwrap().clone();
    let rec = headers.iter().position(|h| h == "record").unwrap();
    let val = headers.iter().position(|h| h == "value").unwrap();
    r.records()
        .map(|row| row.unwrap())
        .filter(|row| &row[rec] == record)
        .map(|row| (!row[val].is_empty()).then(|| row[val].parse().unwrap()))
        .collect()
}

#[test]
fn csv_and_json_carry_identical_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let base = ["matrix", "--oracle", "log_sum_exp", "--space", "l1", "--dim", "3", "--budget", "800", "--seed", "5"];
    let (j, c) = (dir.path().join("r.json"), dir.path().join("r.csv"));
    assert_ne!(run_to(&base, &j), 2);
    let mut csv_args = base.to_vec();
    csv_args.extend_from_slice(&["--format", "csv"]);
    assert_ne!(run_to(&csv_args, &c), 2);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&j).unwrap()).unwrap();
    let text = std::fs::read_to_string(&c).unwrap();

    let from_json: Vec<Option<f64>> = v["estimates"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["L_hat"].as_f64())
        .collect();
    let from_csv = csv_values(&text, "estimate");
    assert!(!from_json.is_empty());
    assert_eq!(from_json.len(), from_csv.len());
    for (a, b) in from_json.iter().zip(&from_csv) {
        assert_eq!(a.map(f64::to_bits), b.map(f64::to_bits));
    }
    let orderings_json: Vec<Option<f64>> = v["matrix"]["constant_orderings"]
        .as_array()
        .unwrap()
        .iter()
        .map(|o| o["L_hat_b"].as_f64())
        .collect();
    let orderings_csv = csv_values(&text, "ordering");
    assert_eq!(
        orderings_json.iter().map(|x| x.map(f64::to_bits)).collect::<Vec<_>>(),
        orderings_csv.iter().map(|x| x.map(f64::to_bits)).collect::<Vec<_>>()
    );
}
