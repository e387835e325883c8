use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const BUILTINS: [&str; 6] = ["delta", "e4", "e6", "eta11", "eta2", "eta4"];

fn qprod(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qprod"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

struct Workspace {
    dir: TempDir,
}

impl Workspace {
    fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        let specs = dir.path().join("specs");
        let out = qprod(&["builtins", "--dir", specs.to_str().unwrap()]);
        assert_eq!(code(&out), 0);
        Workspace { dir }
    }

    fn spec(&self, name: &str) -> String {
        self.path(&format!("specs/{name}.json"))
    }

    fn path(&self, rel: &str) -> String {
        self.dir.path().join(rel).to_str().unwrap().to_string()
    }
}

fn rows(path: impl AsRef<Path>) -> Vec<(i64, String)> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| {
            let (k, v) = l.split_once(',').unwrap();
            (k.parse().unwrap(), v.to_string())
        })
        .collect()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

#[test]
fn expand_delta() {
    let ws = Workspace::new();
    let csv = ws.path("delta.csv");
    let out = qprod(&["expand", "--spec", &ws.spec("delta"), "--terms", "10", "--out", &csv]);
    assert_eq!(code(&out), 0);
    let r = rows(&csv);
    assert_eq!(r.first().unwrap().0, 1);
    assert_eq!(r.last().unwrap().0, 10);
    assert_eq!(r[1], (2, "-24".to_string()));
}

#[test]
fn expand_rejects_bad_input() {
    let ws = Workspace::new();
    let bad = ws.path("bad.json");
    fs::write(&bad, "{\"kind\": ").unwrap();
    assert_eq!(code(&qprod(&["expand", "--spec", &bad, "--terms", "5"])), 2);

    assert_eq!(code(&qprod(&["expand", "--spec", &ws.spec("delta"), "--terms", "0"])), 2);

    let invalid = ws.path("invalid.json");
    fs::write(&invalid, r#"{"kind": "eta_quotient", "level": 11, "weight": 2, "eta_exponents": {"3": 2}}"#)
        .unwrap();
    let out = qprod(&["expand", "--spec", &invalid, "--terms", "5"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("error:"));

    let both = qprod(&["expand", "--spec", &ws.spec("delta"), "--coeffs", &bad, "--terms", "5"]);
    assert_eq!(code(&both), 2);
}

#[test]
fn exponents_of_delta_and_eta11() {
    let ws = Workspace::new();
    let out = qprod(&["exponents", "--spec", &ws.spec("delta"), "--terms", "40"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "m,c_m");
    assert_eq!(lines.len(), 40);
    assert!(lines[1..].iter().enumerate().all(|(i, l)| *l == format!("{},24", i + 1)));

    let csv = ws.path("eta11.csv");
    let out = qprod(&["exponents", "--spec", &ws.spec("eta11"), "--terms", "50", "--out", &csv]);
    assert_eq!(code(&out), 0);
    for (m, c) in rows(&csv) {
        assert_eq!(c, if m % 11 == 0 { "4" } else { "2" }, "m={m}");
    }
}

#[test]
fn exponents_from_ingested_e4() {
    let ws = Workspace::new();
    let coeffs = ws.path("e4_coeffs.csv");
    let out = qprod(&["expand", "--spec", &ws.spec("e4"), "--terms", "20", "--out", &coeffs]);
    assert_eq!(code(&out), 0);
    let out = qprod(&["exponents", "--coeffs", &coeffs, "--terms", "20"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).lines().nth(1) == Some("1,-240"));
}

#[test]
fn expand_ingest_round_trip_for_builtins() {
    let ws = Workspace::new();
    for name in BUILTINS {
        let first = ws.path(&format!("{name}.a.csv"));
        let second = ws.path(&format!("{name}.b.csv"));
        assert_eq!(code(&qprod(&["expand", "--spec", &ws.spec(name), "--terms", "30", "--out", &first])), 0);
        assert_eq!(code(&qprod(&["expand", "--coeffs", &first, "--terms", "30", "--out", &second])), 0);
        assert_eq!(fs::read(&first).unwrap(), fs::read(&second).unwrap(), "{name}");

        let from_spec = qprod(&["exponents", "--spec", &ws.spec(name), "--terms", "29"]);
        let from_file = qprod(&["exponents", "--coeffs", &first, "--terms", "29"]);
        assert_eq!(from_spec.stdout, from_file.stdout, "{name}");
    }
}

#[test]
fn fit_e4_and_e6() {
    let ws = Workspace::new();
    for (name, target) in [("e4", 3f64.sqrt() / 2.0), ("e6", 1.0)] {
        let csv = ws.path(&format!("{name}.exp.csv"));
        assert_eq!(code(&qprod(&["exponents", "--spec", &ws.spec(name), "--terms", "61", "--out", &csv])), 0);
        let out = qprod(&["fit", "--exponents", &csv, "--window", "20:60"]);
        assert_eq!(code(&out), 0);
        let v = json(&out);
        let y = v["y_hat"].as_f64().unwrap();
        assert!((y - target).abs() / target < 0.05, "{name}: {y}");
        assert_eq!(v["points_used"], 41);
        assert_eq!(v["window"], serde_json::json!([20, 60]));

        let direct = qprod(&["fit", "--spec", &ws.spec(name), "--window", "20:60"]);
        let dv = json(&direct);
        assert_eq!(dv["y_hat"], v["y_hat"]);
        assert!(dv["note"].as_str().unwrap().contains("level-1"));
    }
}

#[test]
fn fit_usage_errors() {
    let ws = Workspace::new();
    let delta = ws.spec("delta");
    assert_eq!(code(&qprod(&["fit", "--spec", &delta, "--window", "20:10"])), 2);
    assert_eq!(code(&qprod(&["fit", "--spec", &delta, "--window", "5:30", "--terms", "30"])), 2);
    assert_eq!(code(&qprod(&["fit", "--window", "5:30"])), 2);
    let missing = ws.path("nope.csv");
    assert_eq!(code(&qprod(&["fit", "--exponents", &missing, "--window", "5:30"])), 2);
}

#[test]
fn check_exit_codes() {
    let ws = Workspace::new();
    let delta = qprod(&["check", "--spec", &ws.spec("delta"), "--kind", "kohnen", "--window", "16:200"]);
    assert_eq!(code(&delta), 0);
    let v = json(&delta);
    assert_eq!(v["verdict"], "pass");
    assert!((v["max_ratio"].as_f64().unwrap() - 8.488).abs() < 1e-3);

    let e4 = ws.spec("e4");
    let low = qprod(&["check", "--spec", &e4, "--kind", "upper", "--y-r", "0.5", "--window", "20:60"]);
    assert_eq!(code(&low), 1);
    assert_eq!(json(&low)["verdict"], "fail");

    let ok = qprod(&["check", "--spec", &e4, "--kind", "upper", "--y-r", "0.8660254", "--window", "20:60"]);
    assert_eq!(code(&ok), 0);

    assert_eq!(code(&qprod(&["check", "--spec", &e4, "--kind", "upper", "--window", "20:60"])), 2);
    assert_eq!(code(&qprod(&["check", "--spec", &e4, "--kind", "kohnen", "--window", "10:60"])), 2);
    assert_eq!(code(&qprod(&["check", "--spec", &e4, "--kind", "sideways", "--window", "20:60"])), 2);
}

#[test]
fn level_kloosterman_vanishing() {
    let out = qprod(&["level", "--level", "11"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["genus"], 1);

    let out = qprod(&["kloosterman", "--a", "-1", "--b", "1", "--c-max", "10", "--level", "2"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let data: Vec<Vec<f64>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(data.len(), 5);
    for (i, row) in data.iter().enumerate() {
        assert_eq!(row[0], 2.0 * (i + 1) as f64);
        assert!(row[1].abs() <= row[2]);
    }

    let out = qprod(&["vanishing", "--level", "11", "--bound", "25"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).lines().any(|l| l == "19"));
    assert_eq!(code(&qprod(&["vanishing", "--level", "13", "--bound", "25"])), 2);
}

#[test]
fn outputs_are_deterministic() {
    let ws = Workspace::new();
    let run = |out: &str| {
        let out = ws.path(out);
        assert_eq!(code(&qprod(&["exponents", "--spec", &ws.spec("e6"), "--terms", "80", "--out", &out])), 0);
        fs::read(out).unwrap()
    };
    assert_eq!(run("a.csv"), run("b.csv"));

    let k = |jobs: &str| qprod(&["kloosterman", "--a", "-7", "--b", "1", "--c-max", "60", "--jobs", jobs]).stdout;
    assert_eq!(k("1"), k("4"));
}

#[test]
fn batch_exponents_match_single_runs() {
    let ws = Workspace::new();
    let specs: Vec<String> = BUILTINS.iter().map(|n| ws.spec(n)).collect();
    let dir = PathBuf::from(ws.path("batch"));
    let mut args = vec!["exponents", "--terms", "30", "--jobs", "3", "--out", dir.to_str().unwrap()];
    for s in &specs {
        args.extend(["--spec", s.as_str()]);
    }
    assert_eq!(code(&qprod(&args)), 0);
    for (name, spec) in BUILTINS.iter().zip(&specs) {
        let single = qprod(&["exponents", "--spec", spec, "--terms", "30"]).stdout;
        assert_eq!(fs::read(dir.join(format!("{name}.exponents.csv"))).unwrap(), single, "{name}");
    }

    let mut no_out = vec!["exponents", "--terms", "30"];
    for s in &specs[..2] {
        no_out.extend(["--spec", s.as_str()]);
    }
    assert_eq!(code(&qprod(&no_out)), 2);
}
