//! Cross-module verification suites and their JSON reports.
//!
//! Every suite is a pure function of [`Settings`]: sample points, random
//! parameters and Monte-Carlo streams all derive from `settings.seed`.

mod function_suites;
pub mod integrals;
mod operator_suites;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::algebra::{Axis, Grid, SampledFunction};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SuiteId {
    Lie,
    Algebra,
    Pentagon,
    Comultiplication,
    Counit,
    Antipode,
    Haar,
    Rmatrix,
    Qybe,
    Quasitriangular,
    Limits,
}

impl SuiteId {
    pub const ALL: [SuiteId; 11] = [
        SuiteId::Lie,
        SuiteId::Algebra,
        SuiteId::Pentagon,
        SuiteId::Comultiplication,
        SuiteId::Counit,
        SuiteId::Antipode,
        SuiteId::Haar,
        SuiteId::Rmatrix,
        SuiteId::Qybe,
        SuiteId::Quasitriangular,
        SuiteId::Limits,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SuiteId::Lie => "lie",
            SuiteId::Algebra => "algebra",
            SuiteId::Pentagon => "pentagon",
            SuiteId::Comultiplication => "comultiplication",
            SuiteId::Counit => "counit",
            SuiteId::Antipode => "antipode",
            SuiteId::Haar => "haar",
            SuiteId::Rmatrix => "rmatrix",
            SuiteId::Qybe => "qybe",
            SuiteId::Quasitriangular => "quasitriangular",
            SuiteId::Limits => "limits",
        }
    }

    /// Suites that only make sense for `λ ≠ 0`.
    pub fn needs_nonzero_lambda(self) -> bool {
        !matches!(self, SuiteId::Lie | SuiteId::Limits)
    }

    /// Suites realised on the `n = 1` grid.
    pub fn needs_grid(self) -> bool {
        matches!(self, SuiteId::Algebra | SuiteId::Counit | SuiteId::Antipode | SuiteId::Haar | SuiteId::Limits)
    }
}

impl fmt::Display for SuiteId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SuiteId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SuiteId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown suite '{s}'")))
    }
}

/// Sampling grid for the function-algebra suites.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSpec {
    pub points: usize,
    pub half_width: f64,
    pub r_points: usize,
    pub r_half_width: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { points: 64, half_width: 4.0, r_points: 64, r_half_width: 0.55 }
    }
}

impl GridSpec {
    pub fn grid(&self) -> Result<Grid> {
        Ok(Grid::new(Axis::new(self.half_width, self.points)?, Axis::new(self.r_half_width, self.r_points)?))
    }
}

/// Sweep points and sampling for the limits suite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LimitSettings {
    pub hbar_sweep: Vec<f64>,
    pub lambda_sweep: Vec<f64>,
    pub samples: usize,
    pub oracle_points: usize,
}

impl Default for LimitSettings {
    fn default() -> Self {
        Self {
            hbar_sweep: vec![1.0, 0.5, 0.25, 0.125],
            lambda_sweep: vec![0.5, 0.25, 0.125, 0.0625],
            samples: 1 << 20,
            oracle_points: 8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Settings {
    pub n: usize,
    pub lambda: f64,
    pub hbar: f64,
    pub seed: u64,
    /// Random evaluation points per operator identity.
    pub trials: usize,
    /// Random λ values drawn by the pentagon suite.
    pub lambda_draws: usize,
    /// Random Gaussian vectors for the three-leg R-matrix identities.
    pub vectors: usize,
    /// Sample points for the pointwise integral identities.
    pub sample_points: usize,
    pub grid: GridSpec,
    pub limits: LimitSettings,
    /// Overrides keyed by `suite.check`.
    pub tolerances: BTreeMap<String, f64>,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            n: 1,
            lambda: 1.0,
            hbar: 1.0,
            seed: 20240611,
            trials: 100,
            lambda_draws: 10,
            vectors: 20,
            sample_points: 16,
            grid: GridSpec::default(),
            limits: LimitSettings::default(),
            tolerances: BTreeMap::new(),
        }
    }
}

fn sweep_ok(name: &str, pts: &[f64]) -> Result<()> {
    if pts.len() < 3 {
        return Err(Error::Config(format!("{name} needs at least 3 points, got {}", pts.len())));
    }
    if pts.iter().any(|v| !v.is_finite() || *v <= 0.0) {
        return Err(Error::Config(format!("{name} points must be positive")));
    }
    if pts.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Config(format!("{name} points must decrease")));
    }
    Ok(())
}

impl Settings {
    /// Checks the settings against a suite selection.
    pub fn validate(&self, suites: &[SuiteId]) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Config("n must be at least 1".into()));
        }
        if !self.lambda.is_finite() || !self.hbar.is_finite() {
            return Err(Error::Config("lambda and hbar must be finite".into()));
        }
        if self.lambda == 0.0 {
            let quantum: Vec<&str> = suites.iter().filter(|s| s.needs_nonzero_lambda()).map(|s| s.name()).collect();
            if !quantum.is_empty() {
                return Err(Error::Config(format!(
                    "lambda = 0 is only allowed for the classical-limit suites (lie, limits); selected: {}",
                    quantum.join(", ")
                )));
            }
        }
        if self.trials == 0 || self.lambda_draws == 0 || self.vectors == 0 || self.sample_points == 0 {
            return Err(Error::Config("trials, lambda_draws, vectors and sample_points must be positive".into()));
        }
        for (k, v) in &self.tolerances {
            if !(v.is_finite() && *v > 0.0) {
                return Err(Error::Config(format!("tolerance '{k}' must be positive")));
            }
        }
        if suites.iter().any(|s| s.needs_grid()) {
            if self.n != 1 {
                return Err(Error::Config("the grid suites are realised for n = 1".into()));
            }
            if self.hbar == 0.0 && suites.iter().any(|s| matches!(s, SuiteId::Haar | SuiteId::Antipode)) {
                return Err(Error::Config("haar and antipode suites need hbar != 0".into()));
            }
            let g = self.grid;
            for pts in [g.points, g.r_points] {
                if !pts.is_power_of_two() || pts < 8 {
                    return Err(Error::Config(format!("grid sizes must be powers of two and at least 8, got {pts}")));
                }
            }
            if !(g.half_width > 0.0 && g.r_half_width > 0.0) {
                return Err(Error::Config("grid half-widths must be positive".into()));
            }
        }
        if suites.contains(&SuiteId::Limits) {
            sweep_ok("hbar_sweep", &self.limits.hbar_sweep)?;
            sweep_ok("lambda_sweep", &self.limits.lambda_sweep)?;
            if self.limits.samples == 0 || self.limits.oracle_points == 0 {
                return Err(Error::Config("limits.samples and limits.oracle_points must be positive".into()));
            }
        }
        Ok(())
    }

    pub fn tolerance(&self, suite: SuiteId, check: &str, default: f64) -> f64 {
        self.tolerances.get(&format!("{}.{}", suite.name(), check)).copied().unwrap_or(default)
    }
}

/// Whether a check bounds its defect from above or requires it to exceed `tol`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Bound {
    #[default]
    Upper,
    Lower,
}

mod finite {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub anchor: String,
    /// Non-finite values are written as `null` and never pass.
    #[serde(with = "finite")]
    pub defect: f64,
    pub tol: f64,
    pub pass: bool,
    #[serde(default)]
    pub bound: Bound,
}

impl Check {
    pub fn new(name: &str, anchor: &str, defect: f64, tol: f64, bound: Bound) -> Self {
        let pass = match bound {
            Bound::Upper => defect <= tol,
            Bound::Lower => defect > tol,
        };
        Self { name: name.into(), anchor: anchor.into(), defect, tol, pass, bound }
    }

    /// `defect / tol` for upper bounds, `tol / defect` for lower ones.
    pub fn severity(&self) -> f64 {
        let s = match self.bound {
            Bound::Upper if self.tol > 0.0 => self.defect / self.tol,
            Bound::Upper => {
                if self.defect == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            Bound::Lower => self.tol / self.defect,
        };
        if s.is_nan() {
            f64::INFINITY
        } else {
            s
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridParams {
    #[serde(rename = "N")]
    pub points: usize,
    #[serde(rename = "L")]
    pub half_width: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportParams {
    pub n: usize,
    pub lambda: f64,
    pub hbar: f64,
    pub grid: GridParams,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub params: ReportParams,
    pub checks: Vec<Check>,
    /// Present only when timing was requested; timings break byte-identity.
    pub wall_ms: Option<u64>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    /// The check closest to (or furthest past) its tolerance.
    pub fn worst(&self) -> Option<&Check> {
        self.checks.iter().max_by(|a, b| a.severity().total_cmp(&b.severity()))
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Files a suite asks to be written next to its report.
#[derive(Clone, Debug)]
pub enum Artifact {
    Csv { name: String, content: String },
    Grid { name: String, data: SampledFunction },
}

impl Artifact {
    pub fn name(&self) -> &str {
        match self {
            Artifact::Csv { name, .. } | Artifact::Grid { name, .. } => name,
        }
    }

    pub fn bytes(&self) -> Result<Vec<u8>> {
        match self {
            Artifact::Csv { content, .. } => Ok(content.clone().into_bytes()),
            Artifact::Grid { data, .. } => {
                let mut out = Vec::new();
                data.write_binary(&mut out)?;
                Ok(out)
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct SuiteOutcome {
    pub report: SuiteReport,
    pub artifacts: Vec<Artifact>,
}

/// Collects checks for one suite, applying tolerance overrides.
pub(crate) struct Recorder<'a> {
    suite: SuiteId,
    settings: &'a Settings,
    checks: Vec<Check>,
    artifacts: Vec<Artifact>,
}

impl<'a> Recorder<'a> {
    pub(crate) fn new(suite: SuiteId, settings: &'a Settings) -> Self {
        Self { suite, settings, checks: Vec::new(), artifacts: Vec::new() }
    }

    pub(crate) fn upper(&mut self, name: &str, anchor: &str, defect: f64, tol: f64) {
        let tol = self.settings.tolerance(self.suite, name, tol);
        self.checks.push(Check::new(name, anchor, defect, tol, Bound::Upper));
    }

    pub(crate) fn lower(&mut self, name: &str, anchor: &str, defect: f64, tol: f64) {
        let tol = self.settings.tolerance(self.suite, name, tol);
        self.checks.push(Check::new(name, anchor, defect, tol, Bound::Lower));
    }

    pub(crate) fn artifact(&mut self, a: Artifact) {
        self.artifacts.push(a);
    }

    pub(crate) fn finish(self) -> SuiteOutcome {
        let s = self.settings;
        SuiteOutcome {
            report: SuiteReport {
                suite: self.suite.name().into(),
                params: ReportParams {
                    n: s.n,
                    lambda: s.lambda,
                    hbar: s.hbar,
                    grid: GridParams { points: s.grid.points, half_width: s.grid.half_width },
                    seed: s.seed,
                },
                checks: self.checks,
                wall_ms: None,
            },
            artifacts: self.artifacts,
        }
    }
}

/// Runs one suite. Settings are validated for that suite first.
pub fn run(id: SuiteId, settings: &Settings) -> Result<SuiteOutcome> {
    settings.validate(&[id])?;
    let mut rec = Recorder::new(id, settings);
    match id {
        SuiteId::Lie => operator_suites::lie(&mut rec, settings)?,
        SuiteId::Pentagon => operator_suites::pentagon(&mut rec, settings)?,
        SuiteId::Comultiplication => operator_suites::comultiplication(&mut rec, settings)?,
        SuiteId::Rmatrix => operator_suites::rmatrix(&mut rec, settings)?,
        SuiteId::Qybe => operator_suites::qybe(&mut rec, settings)?,
        SuiteId::Quasitriangular => operator_suites::quasitriangular(&mut rec, settings)?,
        SuiteId::Algebra => function_suites::algebra(&mut rec, settings)?,
        SuiteId::Counit => function_suites::counit(&mut rec, settings)?,
        SuiteId::Antipode => function_suites::antipode(&mut rec, settings)?,
        SuiteId::Haar => function_suites::haar(&mut rec, settings)?,
        SuiteId::Limits => function_suites::limits(&mut rec, settings)?,
    }
    Ok(rec.finish())
}

/// One sweep row: `parameter, defect_L1, defect_L2, ratio`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRow {
    pub parameter: f64,
    pub l1: f64,
    pub l2: f64,
    /// `l1` over the previous row's `l1`; absent on the first row.
    pub ratio: Option<f64>,
}

pub fn sweep_rows(params: &[f64], defects: &[crate::algebra::LimitDefect]) -> Vec<SweepRow> {
    params
        .iter()
        .zip(defects)
        .enumerate()
        .map(|(i, (&p, d))| SweepRow {
            parameter: p,
            l1: d.l1,
            l2: d.l2,
            ratio: (i > 0).then(|| d.l1 / defects[i - 1].l1),
        })
        .collect()
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut s = String::from("parameter,defect_L1,defect_L2,ratio\n");
    for r in rows {
        let ratio = r.ratio.map(|v| format!("{v:e}")).unwrap_or_default();
        s.push_str(&format!("{:e},{:e},{:e},{}\n", r.parameter, r.l1, r.l2, ratio));
    }
    s
}

/// The ℏ sweep of the deformation defect.
pub fn hbar_sweep(settings: &Settings) -> Result<Vec<SweepRow>> {
    function_suites::hbar_sweep_rows(settings)
}

/// The λ sweep of the classical-limit defect.
pub fn lambda_sweep(settings: &Settings) -> Result<Vec<SweepRow>> {
    function_suites::lambda_sweep_rows(settings)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for id in SuiteId::ALL {
            assert_eq!(id.name().parse::<SuiteId>().unwrap(), id);
        }
        assert!("nope".parse::<SuiteId>().is_err());
    }

    #[test]
    fn validation() {
        let mut s = Settings::default();
        assert!(s.validate(&SuiteId::ALL).is_ok());
        s.lambda = 0.0;
        let err = s.validate(&[SuiteId::Pentagon]).unwrap_err().to_string();
        assert!(err.contains("lambda = 0"), "{err}");
        assert!(s.validate(&[SuiteId::Lie, SuiteId::Limits]).is_ok());
        let mut s = Settings::default();
        s.limits.hbar_sweep = vec![1.0];
        assert!(s.validate(&[SuiteId::Limits]).is_err());
        assert!(s.validate(&[SuiteId::Pentagon]).is_ok());
        let mut s = Settings::default();
        s.grid.points = 48;
        assert!(s.validate(&[SuiteId::Algebra]).is_err());
        let mut s = Settings::default();
        s.tolerances.insert("pentagon.u".into(), -1.0);
        assert!(s.validate(&[SuiteId::Pentagon]).is_err());
    }

    #[test]
    fn check_bounds_and_json() {
        let c = Check::new("a", "x", 1e-12, 1e-9, Bound::Upper);
        assert!(c.pass);
        let w = Check::new("w", "x", 0.5, 0.1, Bound::Lower);
        assert!(w.pass);
        let bad = Check::new("nan", "x", f64::NAN, 1.0, Bound::Upper);
        assert!(!bad.pass);
        let r = SuiteReport {
            suite: "t".into(),
            params: ReportParams { n: 1, lambda: 1.0, hbar: 1.0, grid: GridParams { points: 64, half_width: 4.0 }, seed: 1 },
            checks: vec![c, w, bad],
            wall_ms: None,
        };
        let s = r.to_json().unwrap();
        assert!(s.contains("\"N\": 64") && s.contains("\"wall_ms\": null") && s.contains("\"defect\": null"));
        let back = SuiteReport::from_json(&s).unwrap();
        assert!(back.checks[2].defect.is_nan());
        assert!(!back.passed());
        assert_eq!(back.worst().unwrap().name, "nan");
    }

    #[test]
    fn csv_layout() {
        let rows = sweep_rows(
            &[1.0, 0.5],
            &[crate::algebra::LimitDefect { l1: 2.0, l2: 1.0 }, crate::algebra::LimitDefect { l1: 1.0, l2: 0.5 }],
        );
        let csv = sweep_csv(&rows);
        assert_eq!(csv, "parameter,defect_L1,defect_L2,ratio\n1e0,2e0,1e0,\n5e-1,1e0,5e-1,5e-1\n");
    }
}
