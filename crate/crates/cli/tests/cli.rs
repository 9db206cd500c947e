use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use heisqg::suites::{Settings, SuiteReport};

fn heisqg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_heisqg")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn config(dir: &Path, text: &str) -> String {
    let p = dir.join("run.toml");
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

fn json_names(dir: &Path) -> Vec<String> {
    let mut v: Vec<String> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.ends_with(".json"))
        .collect();
    v.sort();
    v
}

#[test]
fn printed_defaults_parse_back() {
    let o = heisqg(&["--print-defaults"]);
    assert_eq!(o.status.code(), Some(0));
    let s: Settings = toml::from_str(&stdout(&o)).unwrap();
    assert_eq!(s, Settings::default());
}

#[test]
fn missing_subcommand_is_usage_error() {
    assert_eq!(heisqg(&[]).status.code(), Some(2));
}

#[test]
fn lambda_zero_with_quantum_suites_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config(tmp.path(), "lambda = 0.0\n");
    let o = heisqg(&["--config", &cfg, "verify", "--suite", "pentagon"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("lambda = 0 is only allowed"), "{}", stderr(&o));
}

#[test]
fn lambda_zero_is_fine_for_classical_suites() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config(tmp.path(), "lambda = 0.0\n");
    let out = tmp.path().join("out");
    let o = heisqg(&["--config", &cfg, "verify", "--suite", "lie", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn unknown_suite_and_unknown_key_are_usage_errors() {
    assert_eq!(heisqg(&["verify", "--suite", "nonsense"]).status.code(), Some(2));
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config(tmp.path(), "lamda = 1.0\n");
    assert_eq!(heisqg(&["--config", &cfg, "verify", "--suite", "lie"]).status.code(), Some(2));
    let cfg = config(tmp.path(), "[grid]\npoints = 48\n");
    assert_eq!(heisqg(&["--config", &cfg, "verify", "--suite", "algebra"]).status.code(), Some(2));
}

#[test]
fn single_suite_writes_single_report() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let o = heisqg(&["verify", "--suite", "pentagon", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(json_names(&out), ["pentagon.json"]);
    let r = SuiteReport::from_json(&fs::read_to_string(out.join("pentagon.json")).unwrap()).unwrap();
    assert!(r.passed());
    assert_eq!(r.wall_ms, None);
    assert!(r.checks.iter().all(|c| !c.anchor.is_empty()));
}

#[test]
fn identical_seed_gives_identical_bytes() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for d in [&a, &b] {
        let o = heisqg(&["--seed", "7", "verify", "--suite", "comultiplication", "--out", d.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
    }
    let name = "comultiplication.json";
    assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap());
    let r = SuiteReport::from_json(&fs::read_to_string(a.join(name)).unwrap()).unwrap();
    assert_eq!(r.params.seed, 7);
}

#[test]
fn timings_are_opt_in() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    heisqg(&["verify", "--suite", "lie", "--timings", "--out", out.to_str().unwrap()]);
    let r = SuiteReport::from_json(&fs::read_to_string(out.join("lie.json")).unwrap()).unwrap();
    assert!(r.wall_ms.is_some());
}

#[test]
fn failing_check_sets_exit_one_and_is_listed_first() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config(tmp.path(), "[tolerances]\n\"pentagon.pentagon_u\" = 1e-300\n");
    let out = tmp.path().join("out");
    let o = heisqg(&["--config", &cfg, "verify", "--suite", "lie", "--suite", "pentagon", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("pentagon_u"), "{}", stdout(&o));

    let o = heisqg(&["report", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 2, "{text}");
    assert!(rows[0].starts_with("FAIL") && rows[0].contains("pentagon"), "{text}");
    assert!(rows[1].starts_with("PASS") && rows[1].contains("lie"), "{text}");
}

#[test]
fn report_on_empty_directory() {
    let tmp = tempfile::tempdir().unwrap();
    let o = heisqg(&["report", tmp.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("no reports found"));
}

#[test]
fn corrupt_report_is_itemized() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    heisqg(&["verify", "--suite", "lie", "--out", out.to_str().unwrap()]);
    fs::write(out.join("broken.json"), "{ not json").unwrap();
    let o = heisqg(&["report", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("broken.json"), "{}", stderr(&o));
    assert!(stdout(&o).contains("lie"));
}

const SMALL_SWEEP: &str = "[grid]\npoints = 32\nr_points = 32\n[limits]\nhbar_sweep = [1.0, 0.5, 0.25]\nlambda_sweep = [0.5, 0.25, 0.125]\nsamples = 16384\n";

#[test]
fn sweep_is_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config(tmp.path(), SMALL_SWEEP);
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for d in [&a, &b] {
        let o = heisqg(&["--config", &cfg, "sweep", "--out", d.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    for name in ["hbar_sweep.csv", "lambda_sweep.csv"] {
        let x = fs::read_to_string(a.join(name)).unwrap();
        assert_eq!(x, fs::read_to_string(b.join(name)).unwrap());
        let lines: Vec<&str> = x.lines().collect();
        assert_eq!(lines[0], "parameter,defect_L1,defect_L2,ratio");
        assert_eq!(lines.len(), 4);
        assert!(lines[1].ends_with(','));
        let l1: Vec<f64> = lines[1..].iter().map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
        assert!(l1.windows(2).all(|w| w[1] < w[0]), "{name}: {x}");
    }
}

#[test]
fn one_point_sweep_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config(tmp.path(), "[limits]\nhbar_sweep = [1.0]\n");
    let o = heisqg(&["--config", &cfg, "sweep", "--out", tmp.path().join("o").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}
