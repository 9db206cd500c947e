//! `heisqg` command-line front end.

mod render;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use heisqg::suites::{self, Settings, SuiteId};

const USAGE: u8 = 2;
const FAILED: u8 = 1;

#[derive(Parser, Debug)]
#[command(name = "heisqg", version, about = "Verification suites for the deformed Heisenberg quantum group")]
struct Cli {
    #[command(flatten)]
    common: Common,
    /// Print the default configuration as TOML and exit.
    #[arg(long, global = true)]
    print_defaults: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Args, Debug)]
struct Common {
    /// TOML configuration file; missing keys take their defaults.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Overrides the seed of the configuration.
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run suites and write one JSON report per suite.
    Verify {
        /// Suite to run; repeat to select several. Default: all.
        #[arg(long = "suite", value_name = "NAME")]
        suites: Vec<SuiteId>,
        #[arg(long, value_name = "DIR", default_value = "heisqg-out")]
        out: PathBuf,
        /// Record wall-clock time in the reports (breaks byte-identity).
        #[arg(long)]
        timings: bool,
    },
    /// Write the hbar and lambda sweep tables as CSV.
    Sweep {
        #[arg(long, value_name = "DIR", default_value = "heisqg-out")]
        out: PathBuf,
    },
    /// Summarise a directory of JSON reports.
    Report {
        #[arg(value_name = "DIR", default_value = "heisqg-out")]
        dir: PathBuf,
    },
}

fn load(common: &Common) -> Result<Settings, String> {
    let mut s = match &common.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            toml::from_str(&text).map_err(|e| format!("invalid config {}: {e}", path.display()))?
        }
        None => Settings::default(),
    };
    if let Some(seed) = common.seed {
        s.seed = seed;
    }
    Ok(s)
}

fn write(dir: &Path, name: &str, bytes: &[u8]) -> Result<(), String> {
    let path = dir.join(name);
    fs::write(&path, bytes).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn verify(settings: &Settings, mut ids: Vec<SuiteId>, out: &Path, timings: bool) -> Result<u8, (u8, String)> {
    if ids.is_empty() {
        ids = SuiteId::ALL.to_vec();
    }
    ids.dedup();
    settings.validate(&ids).map_err(|e| (USAGE, e.to_string()))?;
    fs::create_dir_all(out).map_err(|e| (USAGE, format!("cannot create {}: {e}", out.display())))?;
    let mut status = 0;
    for id in ids {
        let start = Instant::now();
        let mut outcome = suites::run(id, settings).map_err(|e| (FAILED, format!("{id}: {e}")))?;
        if timings {
            outcome.report.wall_ms = Some(start.elapsed().as_millis() as u64);
        }
        let json = outcome.report.to_json().map_err(|e| (FAILED, e.to_string()))?;
        write(out, &format!("{id}.json"), json.as_bytes()).map_err(|e| (FAILED, e))?;
        for a in &outcome.artifacts {
            let bytes = a.bytes().map_err(|e| (FAILED, e.to_string()))?;
            write(out, a.name(), &bytes).map_err(|e| (FAILED, e))?;
        }
        let r = &outcome.report;
        if r.passed() {
            println!("PASS {id:<17} {} checks", r.checks.len());
        } else {
            status = FAILED;
            println!("FAIL {id:<17} {} of {} checks failed", r.failures().count(), r.checks.len());
            for c in r.failures() {
                println!("     {:<32} defect {} tol {:e}", c.name, render::number(c.defect), c.tol);
            }
        }
    }
    Ok(status)
}

fn sweep(settings: &Settings, out: &Path) -> Result<u8, (u8, String)> {
    settings.validate(&[SuiteId::Limits]).map_err(|e| (USAGE, e.to_string()))?;
    fs::create_dir_all(out).map_err(|e| (USAGE, format!("cannot create {}: {e}", out.display())))?;
    let tables = [
        ("hbar_sweep.csv", suites::hbar_sweep(settings)),
        ("lambda_sweep.csv", suites::lambda_sweep(settings)),
    ];
    for (name, rows) in tables {
        let rows = rows.map_err(|e| (FAILED, format!("{name}: {e}")))?;
        let csv = suites::sweep_csv(&rows);
        write(out, name, csv.as_bytes()).map_err(|e| (FAILED, e))?;
        println!("{name}");
        print!("{csv}");
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let settings = match load(&cli.common) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(USAGE);
        }
    };
    if cli.print_defaults {
        match toml::to_string(&Settings::default()) {
            Ok(t) => {
                print!("{t}");
                return ExitCode::SUCCESS;
            }
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(FAILED);
            }
        }
    }
    let result = match cli.command {
        Some(Command::Verify { suites, out, timings }) => verify(&settings, suites, &out, timings),
        Some(Command::Sweep { out }) => sweep(&settings, &out),
        Some(Command::Report { dir }) => Ok(render::report(&dir)),
        None => Err((USAGE, "a subcommand is required (verify, sweep or report)".into())),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
