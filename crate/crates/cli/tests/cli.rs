use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const E3_CONFIG: &str = r#"
command = "solve"

[instance]
beta = 1.0
y = 0.5
r = 3.0

[instance.curves]
t = "affine:0.5,0"
f = "affine:0.1,0"
p = "affine:0.1,0.4"
"#;

const E3_FLAGS: [&str; 10] = [
    "--y",
    "0.5",
    "--r",
    "3",
    "--curve-t",
    "affine:0.5,0",
    "--curve-f",
    "affine:0.1,0",
    "--curve-p",
    "affine:0.1,0.4",
];

const COLUMNS: [&str; 11] = [
    "beta",
    "y",
    "r",
    "mode",
    "model",
    "family",
    "p_accident",
    "p_signal",
    "social_cost",
    "residual",
    "flags",
];

fn hazard(args: &[&str], out_dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hazard"))
        .args(args)
        .env("HAZARD_OUT_DIR", out_dir)
        .output()
        .expect("binary runs")
}

fn path_arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn json_rows(path: &Path) -> Vec<serde_json::Map<String, Value>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| match serde_json::from_str(l).unwrap() {
            Value::Object(m) => m,
            other => panic!("row is not an object: {other}"),
        })
        .collect()
}

/// Checks one row against the documented schema.
fn check_row(get: impl Fn(&str) -> Option<String>) {
    for col in ["beta", "y", "r", "p_accident", "p_signal", "social_cost", "residual"] {
        if let Some(v) = get(col) {
            let x: f64 = v.parse().unwrap_or_else(|_| panic!("{col} = `{v}` is not a number"));
            assert!(x.is_finite());
        }
    }
    if let Some(m) = get("mode") {
        assert!(["exogenous", "endogenous"].contains(&m.as_str()), "mode {m}");
    }
    if let Some(m) = get("model") {
        assert!(["bayesian", "non-bayesian"].contains(&m.as_str()), "model {m}");
    }
    if let Some(f) = get("family") {
        assert!(f.len() == 2 && f.starts_with('E') && ('1'..='7').contains(&f.chars().nth(1).unwrap()));
    }
    let flags = get("flags").expect("flags column always present");
    for pair in flags.split(';').filter(|s| !s.is_empty()) {
        let (k, v) = pair.split_once('=').expect("flag is key=value");
        assert!(!k.is_empty() && !v.is_empty());
    }
}

fn check_json_file(path: &Path) -> usize {
    let rows = json_rows(path);
    for row in &rows {
        let keys: Vec<&str> = row.keys().map(String::as_str).collect();
        let mut expected = COLUMNS.to_vec();
        expected.sort_unstable();
        let mut keys_sorted = keys.clone();
        keys_sorted.sort_unstable();
        assert_eq!(keys_sorted, expected);
        check_row(|c| match &row[c] {
            Value::Null => None,
            Value::String(s) => Some(s.clone()),
            Value::Number(n) => Some(n.to_string()),
            other => panic!("unexpected value {other}"),
        });
    }
    rows.len()
}

fn check_csv_file(path: &Path) -> Vec<csv::StringRecord> {
    let mut reader = csv::Reader::from_path(path).unwrap();
    assert_eq!(reader.headers().unwrap().iter().collect::<Vec<_>>(), COLUMNS);
    let records: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    for rec in &records {
        assert_eq!(rec.len(), COLUMNS.len());
        check_row(|c| {
            let i = COLUMNS.iter().position(|k| *k == c).unwrap();
            let v = &rec[i];
            (!v.is_empty() || c == "flags").then(|| v.to_string())
        });
    }
    records
}

#[test]
fn solve_e3_emits_one_json_row() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "e3.toml", E3_CONFIG);
    let out = dir.path().join("e3.jsonl");
    let res = hazard(&["--config", path_arg(&cfg), "--out", path_arg(&out)], dir.path());
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));

    assert_eq!(check_json_file(&out), 1);
    let row = &json_rows(&out)[0];
    assert_eq!(row["family"], "E3");
    assert_eq!(row["model"], "non-bayesian");
    let p = row["p_accident"].as_f64().unwrap();
    let j = row["social_cost"].as_f64().unwrap();
    assert!((p - 0.259259259).abs() <= 1e-9);
    assert!((j - 0.601851852).abs() <= 1e-9);
}

#[test]
fn both_models_agree_on_e3() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["--command", "solve", "--beta", "1", "--models", "bayesian,non-bayesian"];
    args.extend(E3_FLAGS);
    let res = hazard(&args, dir.path());
    assert!(res.status.success());
    let rows = json_rows(&dir.path().join("solve.jsonl"));
    assert_eq!(rows.len(), 2);
    let j: Vec<f64> = rows.iter().map(|r| r["social_cost"].as_f64().unwrap()).collect();
    assert!((j[0] - j[1]).abs() <= 1e-12);
}

#[test]
fn exogenous_sweep_csv_is_non_increasing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    let mut args = vec![
        "--command",
        "sweep",
        "--beta-grid",
        "0:1:101",
        "--exo-p",
        "0.3",
        "--format",
        "csv",
        "--out",
        path_arg(&out),
    ];
    args.extend(E3_FLAGS);
    let res = hazard(&args, dir.path());
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));

    let records = check_csv_file(&out);
    assert_eq!(records.len(), 101);
    let j: Vec<f64> = records.iter().map(|r| r[8].parse().unwrap()).collect();
    assert!(j.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    assert!(records.iter().all(|r| &r[3] == "exogenous"));
    assert!(j[100] < j[0], "information helps on this instance");
}

#[test]
fn invalid_r_exits_one_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.toml", &E3_CONFIG.replace("r = 3.0", "r = 0.5"));
    let out = dir.path().join("never.jsonl");
    let res = hazard(&["--config", path_arg(&cfg), "--out", path_arg(&out)], dir.path());
    assert_eq!(res.status.code(), Some(1));
    assert!(!out.exists());
    assert!(String::from_utf8_lossy(&res.stderr).contains("`r`"));

    let res = hazard(&["--config", path_arg(&cfg)], dir.path());
    assert_eq!(res.status.code(), Some(1));
    assert!(!dir.path().join("solve.jsonl").exists());
}

#[test]
fn other_validation_failures_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "e3.toml", E3_CONFIG);
    let c = path_arg(&cfg);
    for args in [
        vec!["--config", c, "--curve-p", "affine:0.5,0.9"],
        vec!["--config", c, "--beta", "1.5"],
        vec!["--config", c, "--exo-p", "0.9"],
        vec!["--config", c, "--command", "validate-mc"],
        vec!["--config", c, "--bogus"],
        vec!["--beta", "1"],
    ] {
        let res = hazard(&args, dir.path());
        assert_eq!(res.status.code(), Some(1), "{args:?}");
    }
    let broken = write_config(dir.path(), "broken.toml", "command = \"solve\"\n[instance\n");
    assert_eq!(hazard(&["--config", path_arg(&broken)], dir.path()).status.code(), Some(1));
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 2, "only the two configs exist");
}

#[test]
fn default_output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let nested = dir.path().join("results");
    let cfg = write_config(dir.path(), "e3.toml", E3_CONFIG);
    let res = hazard(&["--config", path_arg(&cfg), "--command", "classify", "--format", "csv"], &nested);
    assert!(res.status.success());
    let records = check_csv_file(&nested.join("classify.csv"));
    assert_eq!(records.len(), 1);
    assert_eq!(&records[0][5], "E3");
    assert!(records[0][10].contains("p_n=2.5000000000000000e-1"));
}

#[test]
fn every_command_emits_schema_valid_rows() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "all.toml",
        &format!(
            "{E3_CONFIG}\n[analysis]\nseed = 11\nsamples = 20000\ncount = 60\nmodels = [\"bayesian\", \"non-bayesian\"]\n\n\
             [analysis.paradox]\nys = [0.3]\nrs = [2.0]\nintercepts = [0.3]\nslopes = [0.7]\n\
             betas = {{ start = 0.0, stop = 1.0, count = 51 }}\n"
        ),
    );
    for command in ["solve", "sweep", "classify", "paradox-search", "certify-equivalence", "validate-mc"] {
        for format in ["csv", "json-lines"] {
            let out = dir.path().join(format!("{command}.{format}"));
            let res = hazard(
                &["--config", path_arg(&cfg), "--command", command, "--format", format, "--out", path_arg(&out)],
                dir.path(),
            );
            assert!(res.status.success(), "{command}: {}", String::from_utf8_lossy(&res.stderr));
            let n = if format == "csv" {
                check_csv_file(&out).len()
            } else {
                check_json_file(&out)
            };
            assert!(n > 0, "{command} wrote no rows");
            if command == "paradox-search" {
                assert_eq!(n, 2, "one certificate, two points");
            }
            if command == "certify-equivalence" {
                assert_eq!(n, 120);
            }
        }
    }
}

#[test]
fn identical_inputs_give_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "e3.toml", E3_CONFIG);
    let c = path_arg(&cfg);
    for extra in [
        vec!["--command", "validate-mc", "--seed", "5", "--samples", "50000"],
        vec!["--command", "sweep", "--beta-grid", "0:1:21", "--models", "bayesian,non-bayesian"],
        vec!["--command", "certify-equivalence", "--count", "200", "--seed", "3"],
    ] {
        let outputs: Vec<Vec<u8>> = (0..2)
            .map(|k| {
                let out = dir.path().join(format!("run{k}.out"));
                let mut args = vec!["--config", c, "--out", path_arg(&out)];
                args.extend(&extra);
                assert!(hazard(&args, dir.path()).status.success(), "{extra:?}");
                std::fs::read(&out).unwrap()
            })
            .collect();
        assert_eq!(outputs[0], outputs[1], "{extra:?}");
    }
}

#[test]
fn numbers_round_trip_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    let mut args = vec!["--command", "solve", "--beta", "0.7", "--format", "csv", "--out", path_arg(&out)];
    args.extend(E3_FLAGS);
    assert!(hazard(&args, dir.path()).status.success());
    let records = check_csv_file(&out);
    let beta: f64 = records[0][0].parse().unwrap();
    assert_eq!(beta.to_bits(), 0.7f64.to_bits());
    for col in [6, 7, 8] {
        let text = &records[0][col];
        let x: f64 = text.parse().unwrap();
        assert_eq!(format!("{x:.16e}"), text);
    }
}
