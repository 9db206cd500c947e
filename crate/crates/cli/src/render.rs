//! Text summary of a report directory.

use std::fs;
use std::path::Path;

use heisqg::suites::SuiteReport;

pub fn number(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.3e}")
    } else {
        "non-finite".into()
    }
}

struct Row {
    pass: bool,
    suite: String,
    check: String,
    defect: String,
    tol: String,
    anchor: String,
}

fn row(r: &SuiteReport) -> Row {
    let (check, defect, tol, anchor) = match r.worst() {
        Some(c) => (c.name.clone(), number(c.defect), format!("{:.1e}", c.tol), c.anchor.clone()),
        None => ("(no checks)".into(), "-".into(), "-".into(), String::new()),
    };
    Row { pass: r.passed(), suite: r.suite.clone(), check, defect, tol, anchor }
}

/// Prints the table and returns the exit status: 0 only if every report
/// parsed and passed.
pub fn report(dir: &Path) -> u8 {
    let entries = match fs::read_dir(dir) {
        Ok(e) => e,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", dir.display());
            return 1;
        }
    };
    let mut paths: Vec<_> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    let mut rows = Vec::new();
    let mut broken = 0;
    for p in &paths {
        match fs::read_to_string(p).map_err(|e| e.to_string()).and_then(|t| SuiteReport::from_json(&t).map_err(|e| e.to_string())) {
            Ok(r) => rows.push(row(&r)),
            Err(e) => {
                broken += 1;
                eprintln!("warning: {}: {e}", p.display());
            }
        }
    }
    if rows.is_empty() && broken == 0 {
        println!("no reports found");
        return 1;
    }
    rows.sort_by(|a, b| a.pass.cmp(&b.pass).then_with(|| a.suite.cmp(&b.suite)));
    println!("{:<6} {:<17} {:<32} {:>10} {:>8}  anchor", "status", "suite", "worst check", "defect", "tol");
    for r in &rows {
        let status = if r.pass { "PASS" } else { "FAIL" };
        println!("{status:<6} {:<17} {:<32} {:>10} {:>8}  {}", r.suite, r.check, r.defect, r.tol, r.anchor);
    }
    if broken > 0 || rows.iter().any(|r| !r.pass) {
        1
    } else {
        0
    }
}
