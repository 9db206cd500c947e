//! Acceptance run: one line per criterion, nonzero exit if any fails.

use std::collections::BTreeMap;
use std::time::Instant;

use heisqg::algebra::SampledFunction;
use heisqg::lie::{cybe_defect_at, rat};
use heisqg::suites::{run, Artifact, Settings, SuiteId, SuiteOutcome};

struct Run {
    outcome: SuiteOutcome,
    secs: f64,
}

#[derive(Clone, Copy)]
enum Want {
    Zero,
    Below(f64),
    AtMost(f64),
    Above(f64),
}

struct Criterion {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Criterion {
    fn new() -> Self {
        Self { failures: Vec::new(), notes: Vec::new() }
    }

    fn expect(&mut self, runs: &BTreeMap<SuiteId, Run>, suite: SuiteId, name: &str, want: Want) {
        let Some(c) = runs[&suite].outcome.report.checks.iter().find(|c| c.name == name) else {
            self.failures.push(format!("{suite}.{name} missing"));
            return;
        };
        let d = c.defect;
        let (ok, rel) = match want {
            Want::Zero => (d == 0.0, "= 0".to_string()),
            Want::Below(t) => (d < t, format!("< {t:e}")),
            Want::AtMost(t) => (d <= t, format!("<= {t:e}")),
            Want::Above(t) => (d > t, format!("> {t:e}")),
        };
        let line = format!("{name} {d:.2e} {rel}");
        if ok {
            self.notes.push(line);
        } else {
            self.failures.push(line);
        }
    }

    fn runtime(&mut self, secs: f64, limit: f64) {
        let line = format!("{secs:.1} s < {limit} s");
        if secs < limit {
            self.notes.push(line);
        } else {
            self.failures.push(line);
        }
    }

    fn require(&mut self, ok: bool, what: &str) {
        if ok {
            self.notes.push(what.to_string());
        } else {
            self.failures.push(what.to_string());
        }
    }

    fn report(self, index: usize, title: &str) -> bool {
        let pass = self.failures.is_empty();
        let status = if pass { "PASS" } else { "FAIL" };
        let detail = if pass { self.notes.join("; ") } else { self.failures.join("; ") };
        println!("criterion {index:>2} {status} {title}: {detail}");
        pass
    }
}

fn run_all(settings: &Settings) -> BTreeMap<SuiteId, Run> {
    SuiteId::ALL
        .iter()
        .map(|&id| {
            let t = Instant::now();
            let outcome = run(id, settings).unwrap_or_else(|e| panic!("{id}: {e}"));
            (id, Run { outcome, secs: t.elapsed().as_secs_f64() })
        })
        .collect()
}

/// Every byte a suite would write: the JSON report and each artifact.
fn output_bytes(runs: &BTreeMap<SuiteId, Run>) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    for (id, r) in runs {
        out.insert(format!("{id}.json"), r.outcome.report.to_json().unwrap().into_bytes());
        for a in &r.outcome.artifacts {
            out.insert(a.name().to_string(), a.bytes().unwrap());
        }
    }
    out
}

fn in_pool(threads: usize, settings: &Settings) -> BTreeMap<String, Vec<u8>> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
    pool.install(|| output_bytes(&run_all(settings)))
}

fn main() {
    use SuiteId::*;
    use Want::*;
    let settings = Settings::default();
    let mut all = true;

    let mut c = Criterion::new();
    let t = Instant::now();
    let mut nonzero = 0;
    for n in 1..=3 {
        for lam in [rat(1, 1), rat(-1, 1), rat(1, 2)] {
            nonzero += cybe_defect_at(n, &lam).unwrap().support().len();
        }
    }
    c.require(nonzero == 0, &format!("{nonzero} nonzero coefficients over n in 1..=3, lambda in {{1,-1,1/2}}"));
    c.runtime(t.elapsed().as_secs_f64(), 1.0);
    all &= c.report(1, "CYBE");

    let runs = run_all(&settings);

    let mut c = Criterion::new();
    for name in ["dual_bracket", "delta_cocycle", "theta_pairing"] {
        c.expect(&runs, Lie, name, Zero);
    }
    c.runtime(runs[&Lie].secs, 1.0);
    all &= c.report(2, "bialgebra duality");

    let mut c = Criterion::new();
    c.require(settings.trials == 100 && settings.lambda_draws == 10, "100 points x 10 random lambda");
    c.expect(&runs, Pentagon, "pentagon_u", Below(1e-9));
    c.expect(&runs, Pentagon, "pentagon_u_extended", Below(1e-9));
    c.runtime(runs[&Pentagon].secs, 5.0);
    all &= c.report(3, "pentagon");

    let mut c = Criterion::new();
    c.require(settings.grid.points == 64, "N = 64");
    c.expect(&runs, Algebra, "associativity", Below(1e-6));
    c.expect(&runs, Algebra, "pipeline_vs_oracle", Below(1e-7));
    c.expect(&runs, Algebra, "star_antimultiplicative", Below(1e-7));
    c.expect(&runs, Algebra, "hbar_zero_pointwise", Below(1e-10));
    c.runtime(runs[&Algebra].secs, 60.0);
    all &= c.report(4, "algebra axioms");

    let mut c = Criterion::new();
    c.expect(&runs, Comultiplication, "delta_block", Below(1e-9));
    c.expect(&runs, Comultiplication, "delta_block_extended", Below(1e-9));
    c.expect(&runs, Comultiplication, "coassociativity", Below(1e-9));
    c.expect(&runs, Comultiplication, "coassociativity_extended", Below(1e-9));
    c.expect(&runs, Comultiplication, "kernel_vs_operators", Below(1e-6));
    all &= c.report(5, "comultiplication");

    let mut c = Criterion::new();
    c.expect(&runs, Counit, "origin_value", Below(1e-14));
    c.expect(&runs, Counit, "multiplicative", Below(1e-6));
    c.expect(&runs, Counit, "right_counit", Zero);
    c.expect(&runs, Counit, "left_counit", Zero);
    all &= c.report(6, "counit");

    let mut c = Criterion::new();
    c.require(settings.sample_points == 16, "16 sample points");
    c.expect(&runs, Antipode, "t_involution", Below(1e-9));
    c.expect(&runs, Antipode, "t_conjugation", Below(1e-9));
    c.expect(&runs, Antipode, "antimultiplicative", Below(1e-5));
    c.expect(&runs, Antipode, "axiom_id_kappa", Below(1e-5));
    c.expect(&runs, Antipode, "axiom_kappa_id", Below(1e-5));
    c.expect(&runs, Antipode, "flip_kernel", Below(1e-6));
    all &= c.report(7, "antipode");

    let mut c = Criterion::new();
    c.expect(&runs, Haar, "trace_norm", Below(1e-6));
    c.expect(&runs, Haar, "left_invariance", Below(1e-5));
    c.expect(&runs, Haar, "not_antipode_invariant", Above(0.1));
    let dir = tempfile::tempdir().unwrap();
    let persisted = runs[&Haar].outcome.artifacts.iter().find_map(|a| match a {
        Artifact::Grid { name, data } if name == "haar_witness.bin" => {
            let path = dir.path().join(name);
            std::fs::write(&path, a.bytes().ok()?).ok()?;
            let back = SampledFunction::read_binary(std::fs::File::open(&path).ok()?).ok()?;
            Some((back, data))
        }
        _ => None,
    });
    match persisted {
        Some((back, data)) => {
            let peak = data.max_abs();
            let drift = data.sub(&back).map_or(f64::INFINITY, |d| d.max_abs());
            c.require(drift <= 1e-6 * peak, &format!("witness persisted, f32 read-back drift {:.1e}", drift / peak));
            // h(kappa phi) / h(phi) = sum e^{-2 lambda r} phi / sum phi on the stored samples.
            let n2 = back.n_fast() * back.n_fast();
            let (mut num, mut den) = (0.0, 0.0);
            for (k, slice) in back.data.chunks(n2).enumerate() {
                let s: f64 = slice.iter().map(|v| v.re).sum();
                num += (-2.0 * settings.lambda * back.grid.r.coord(k)).exp() * s;
                den += s;
            }
            let ratio = num / den;
            c.require((ratio - 1.0).abs() > 0.1, &format!("stored witness |ratio - 1| = {:.3}", (ratio - 1.0).abs()));
        }
        None => c.require(false, "witness artifact missing"),
    }
    all &= c.report(8, "Haar weight");

    let mut c = Criterion::new();
    c.expect(&runs, Rmatrix, "almost_cocommutative_symbolic", Below(1e-9));
    c.expect(&runs, Rmatrix, "almost_cocommutative_slices", Below(1e-5));
    c.require(settings.vectors == 20, "20 random Gaussian vectors");
    c.expect(&runs, Qybe, "qybe", Below(1e-8));
    c.expect(&runs, Quasitriangular, "delta_first_leg", Below(1e-8));
    c.expect(&runs, Quasitriangular, "delta_second_leg", Below(1e-8));
    c.expect(&runs, Rmatrix, "r21_differs_from_inverse", Above(1e-2));
    c.runtime(runs[&Rmatrix].secs + runs[&Qybe].secs + runs[&Quasitriangular].secs, 120.0);
    all &= c.report(9, "R-matrix");

    let mut c = Criterion::new();
    c.require(settings.limits.hbar_sweep == [1.0, 0.5, 0.25, 0.125], "hbar in {1,1/2,1/4,1/8}");
    c.require(settings.limits.lambda_sweep == [0.5, 0.25, 0.125, 0.0625], "lambda in {1/2,...,1/16}");
    c.require(settings.limits.oracle_points == 8, "8 oracle points");
    c.expect(&runs, Limits, "hbar_sweep_ratio", AtMost(0.6));
    c.expect(&runs, Limits, "lambda_sweep_ratio", AtMost(0.7));
    c.expect(&runs, Limits, "commutator_vs_oracle", Below(1e-3));
    c.runtime(runs[&Limits].secs, 600.0);
    all &= c.report(10, "limits");

    let mut c = Criterion::new();
    let reference = output_bytes(&runs);
    let one = in_pool(1, &settings);
    let four = in_pool(4, &settings);
    c.require(one == four, "1 and 4 threads give identical bytes");
    c.require(one == reference, "identical to the default pool");
    c.require(reference.keys().any(|k| k.ends_with(".csv")), &format!("{} files compared", reference.len()));
    all &= c.report(11, "reproducibility");

    if !all {
        std::process::exit(1);
    }
}
