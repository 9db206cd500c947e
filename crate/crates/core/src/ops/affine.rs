//! Operators of the form `ξ ↦ exp(la)·ē[ph]·(ξ∘S)` with optional complex
//! conjugation, and their exact calculus.

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::expr::{coord, cst, CoordExpr};
use crate::{ebar, rng, Error, Result, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LegKind {
    /// Coordinates `(x_1..x_n, y_1..y_n, r)`.
    Plain,
    /// Coordinates `(x_1..x_n, y_1..y_n, r, w)`.
    Extended,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LegSignature {
    pub n: usize,
    pub legs: Vec<LegKind>,
}

impl LegSignature {
    pub fn plain(n: usize, legs: usize) -> Self {
        Self { n, legs: vec![LegKind::Plain; legs] }
    }

    pub fn extended(n: usize, legs: usize) -> Self {
        Self { n, legs: vec![LegKind::Extended; legs] }
    }

    pub fn leg_width(&self, leg: usize) -> usize {
        match self.legs[leg] {
            LegKind::Plain => 2 * self.n + 1,
            LegKind::Extended => 2 * self.n + 2,
        }
    }

    pub fn num_legs(&self) -> usize {
        self.legs.len()
    }

    pub fn offset(&self, leg: usize) -> usize {
        (0..leg).map(|l| self.leg_width(l)).sum()
    }

    pub fn dim(&self) -> usize {
        self.offset(self.legs.len())
    }

    pub fn x(&self, leg: usize, i: usize) -> usize {
        self.offset(leg) + i
    }

    pub fn y(&self, leg: usize, i: usize) -> usize {
        self.offset(leg) + self.n + i
    }

    pub fn r(&self, leg: usize) -> usize {
        self.offset(leg) + 2 * self.n
    }

    pub fn w(&self, leg: usize) -> Option<usize> {
        (self.legs[leg] == LegKind::Extended).then(|| self.offset(leg) + 2 * self.n + 1)
    }

    /// Leg-local coordinate expressions `(x, y, r, w?)`.
    pub fn leg_coords(&self, leg: usize) -> LegCoords {
        let n = self.n;
        LegCoords {
            x: (0..n).map(|i| coord(self.x(leg, i))).collect(),
            y: (0..n).map(|i| coord(self.y(leg, i))).collect(),
            r: coord(self.r(leg)),
            w: self.w(leg).map(coord),
        }
    }

    pub fn fast_indices(&self) -> Vec<usize> {
        (0..self.num_legs())
            .flat_map(|l| (0..2 * self.n).map(move |i| (l, i)))
            .map(|(l, i)| self.offset(l) + i)
            .collect()
    }

    pub fn slow_indices(&self) -> Vec<usize> {
        let mut v = Vec::new();
        for l in 0..self.num_legs() {
            v.push(self.r(l));
            if let Some(w) = self.w(l) {
                v.push(w);
            }
        }
        v
    }

    pub fn sub(&self, which: &[usize]) -> Self {
        Self { n: self.n, legs: which.iter().map(|&l| self.legs[l]).collect() }
    }
}

#[derive(Clone, Debug)]
pub struct LegCoords {
    pub x: Vec<CoordExpr>,
    pub y: Vec<CoordExpr>,
    pub r: CoordExpr,
    pub w: Option<CoordExpr>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffinePhaseOp {
    pub name: String,
    pub sig: LegSignature,
    /// Output coordinate `i` of the substitution `S`.
    pub subst: Vec<CoordExpr>,
    /// `S⁻¹`, supplied by the builder when known.
    pub inverse_subst: Option<Vec<CoordExpr>>,
    pub log_amp: CoordExpr,
    pub phase: CoordExpr,
    pub antilinear: bool,
}

/// Outcome of a randomized operator comparison.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EqualityReport {
    pub equal: bool,
    pub max_defect: f64,
    pub witness: Option<Vec<f64>>,
    pub component: Option<String>,
}

impl AffinePhaseOp {
    pub fn identity(sig: &LegSignature) -> Self {
        let ids: Vec<CoordExpr> = (0..sig.dim()).map(coord).collect();
        Self {
            name: "id".into(),
            sig: sig.clone(),
            subst: ids.clone(),
            inverse_subst: Some(ids),
            log_amp: cst(0.0),
            phase: cst(0.0),
            antilinear: false,
        }
    }

    pub fn named(mut self, name: &str) -> Self {
        self.name = name.into();
        self
    }

    pub fn dim(&self) -> usize {
        self.sig.dim()
    }

    /// `S(X)`.
    pub fn subst_at(&self, x: &[f64]) -> Vec<f64> {
        self.subst.iter().map(|e| e.eval(x)).collect()
    }

    /// `(Aξ)(X)`.
    pub fn apply_pointwise(&self, xi: &dyn Fn(&[f64]) -> C64, x: &[f64]) -> C64 {
        let v = xi(&self.subst_at(x));
        let v = if self.antilinear { v.conj() } else { v };
        self.log_amp.eval(x).exp() * ebar(self.phase.eval(x)) * v
    }

    /// `A∘B`.
    pub fn compose(a: &Self, b: &Self) -> Result<Self> {
        if a.sig != b.sig {
            return Err(Error::Signature(format!("cannot compose {} with {}", a.name, b.name)));
        }
        let sign = if a.antilinear { -1.0 } else { 1.0 };
        let subst = b.subst.iter().map(|e| e.substitute(&a.subst)).collect();
        let inverse_subst = match (&a.inverse_subst, &b.inverse_subst) {
            (Some(ia), Some(ib)) => Some(ia.iter().map(|e| e.substitute(ib)).collect()),
            _ => None,
        };
        Ok(Self {
            name: format!("{}∘{}", a.name, b.name),
            sig: a.sig.clone(),
            subst,
            inverse_subst,
            log_amp: a.log_amp.clone() + b.log_amp.substitute(&a.subst),
            phase: a.phase.clone() + sign * b.phase.substitute(&a.subst),
            antilinear: a.antilinear != b.antilinear,
        })
    }

    pub fn compose_all(ops: &[&Self]) -> Result<Self> {
        let (first, rest) = ops.split_first().ok_or_else(|| Error::Signature("empty composition".into()))?;
        rest.iter().try_fold((*first).clone(), |acc, op| Self::compose(&acc, op))
    }

    /// Exact inverse; for the isometric operators built here it is also the adjoint.
    pub fn inverse(&self) -> Result<Self> {
        let inv = self
            .inverse_subst
            .clone()
            .ok_or_else(|| Error::Unsupported(format!("{} has no inverse substitution", self.name)))?;
        let sign = if self.antilinear { 1.0 } else { -1.0 };
        Ok(Self {
            name: format!("{}⁻¹", self.name),
            sig: self.sig.clone(),
            log_amp: -self.log_amp.substitute(&inv),
            phase: sign * self.phase.substitute(&inv),
            subst: inv,
            inverse_subst: Some(self.subst.clone()),
            antilinear: self.antilinear,
        })
    }

    /// Acts as `op` on legs `which` of `target` and as the identity elsewhere.
    pub fn embed_legs(op: &Self, which: &[usize], target: &LegSignature) -> Result<Self> {
        if which.len() != op.sig.num_legs() {
            return Err(Error::Signature(format!("{} needs {} legs", op.name, op.sig.num_legs())));
        }
        for (k, &l) in which.iter().enumerate() {
            if l >= target.num_legs() || which[..k].contains(&l) {
                return Err(Error::Signature(format!("leg index {l} out of range or repeated")));
            }
            if target.legs[l] != op.sig.legs[k] || target.n != op.sig.n {
                return Err(Error::Signature(format!("leg {l} has the wrong kind for {}", op.name)));
            }
        }
        if op.antilinear && which.len() != target.num_legs() {
            return Err(Error::Signature(format!(
                "antilinear {} cannot act on a proper subset of legs",
                op.name
            )));
        }
        let local_to_global: Vec<usize> = which
            .iter()
            .flat_map(|&l| (0..target.leg_width(l)).map(move |i| target.offset(l) + i))
            .collect();
        let map = |i: usize| local_to_global[i];
        let lift = |v: &[CoordExpr]| {
            let mut out: Vec<CoordExpr> = (0..target.dim()).map(coord).collect();
            for (i, e) in v.iter().enumerate() {
                out[local_to_global[i]] = e.reindex(&map);
            }
            out
        };
        let suffix: Vec<String> = which.iter().map(|l| (l + 1).to_string()).collect();
        Ok(Self {
            name: format!("{}_{}", op.name, suffix.join("")),
            sig: target.clone(),
            subst: lift(&op.subst),
            inverse_subst: op.inverse_subst.as_ref().map(|v| lift(v)),
            log_amp: op.log_amp.reindex(&map),
            phase: op.phase.reindex(&map),
            antilinear: op.antilinear,
        })
    }

    /// `A⊗B` for linear `A`, `B`.
    pub fn tensor(a: &Self, b: &Self) -> Result<Self> {
        if a.sig.n != b.sig.n {
            return Err(Error::Signature("tensor factors disagree on n".into()));
        }
        let mut legs = a.sig.legs.clone();
        legs.extend(&b.sig.legs);
        let sig = LegSignature { n: a.sig.n, legs };
        let na = a.sig.num_legs();
        let ea = Self::embed_legs(a, &(0..na).collect::<Vec<_>>(), &sig);
        let eb = Self::embed_legs(b, &(na..sig.num_legs()).collect::<Vec<_>>(), &sig)?;
        let ea = ea.map_err(|_| Error::Signature("antilinear tensor factors are not supported".into()))?;
        let mut t = Self::compose(&ea, &eb)?;
        t.name = format!("{}⊗{}", a.name, b.name);
        Ok(t)
    }

    /// `(Pξ)(X) = ξ(X')` where leg `k` of `X'` is leg `perm[k]` of `X`.
    pub fn leg_permutation(sig: &LegSignature, perm: &[usize]) -> Result<Self> {
        let mut seen = vec![false; sig.num_legs()];
        if perm.len() != sig.num_legs() {
            return Err(Error::Signature("permutation length mismatch".into()));
        }
        for &p in perm {
            if p >= seen.len() || seen[p] {
                return Err(Error::Signature("not a permutation".into()));
            }
            seen[p] = true;
            if sig.legs[p] != sig.legs[perm.iter().position(|&q| q == p).unwrap()] {
                return Err(Error::Signature("permutation mixes leg kinds".into()));
            }
        }
        let mut subst = Vec::with_capacity(sig.dim());
        let mut inv = vec![cst(0.0); sig.dim()];
        for (k, &p) in perm.iter().enumerate() {
            for i in 0..sig.leg_width(k) {
                subst.push(coord(sig.offset(p) + i));
                inv[sig.offset(p) + i] = coord(sig.offset(k) + i);
            }
        }
        Ok(Self {
            name: "perm".into(),
            sig: sig.clone(),
            subst,
            inverse_subst: Some(inv),
            log_amp: cst(0.0),
            phase: cst(0.0),
            antilinear: false,
        })
    }

    /// The flip `Σ` on two legs.
    pub fn flip(sig: &LegSignature) -> Result<Self> {
        Ok(Self::leg_permutation(sig, &[1, 0])?.named("Σ"))
    }

    /// `ΣAΣ`.
    pub fn flipped(&self) -> Result<Self> {
        let s = Self::flip(&self.sig)?;
        let mut out = Self::compose_all(&[&s, self, &s])?;
        out.name = format!("Σ{}Σ", self.name);
        Ok(out)
    }

    /// `max |S(S⁻¹X) − X|` over random points.
    pub fn inverse_defect(&self, trials: usize, seed: u64) -> Result<f64> {
        let inv = self
            .inverse_subst
            .as_ref()
            .ok_or_else(|| Error::Unsupported(format!("{} has no inverse substitution", self.name)))?;
        let mut rng = rng::stream(seed, "inverse_defect");
        let mut worst = 0.0f64;
        for _ in 0..trials {
            let x: Vec<f64> = (0..self.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let y: Vec<f64> = inv.iter().map(|e| e.eval(&x)).collect();
            let z = self.subst_at(&y);
            for (a, b) in z.iter().zip(&x) {
                worst = worst.max((a - b).abs() / b.abs().max(1.0));
            }
        }
        Ok(worst)
    }

    /// `max |exp(2·la)/|det ∂S| − 1|`, zero exactly when the operator is isometric.
    pub fn unitarity_defect(&self, trials: usize, seed: u64) -> f64 {
        let d = self.dim();
        let jac: Vec<Vec<CoordExpr>> = self.subst.iter().map(|e| (0..d).map(|j| e.diff(j)).collect()).collect();
        let mut rng = rng::stream(seed, "unitarity_defect");
        let mut worst = 0.0f64;
        for _ in 0..trials {
            let x: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let j = DMatrix::from_fn(d, d, |a, b| jac[a][b].eval(&x));
            let det = j.determinant().abs();
            let v = (2.0 * self.log_amp.eval(&x) - det.ln()).exp();
            worst = worst.max((v - 1.0).abs());
        }
        worst
    }

    /// Componentwise distance at one point: substitution outputs, log-amplitude
    /// and phase modulo 1.
    pub fn point_defect(a: &Self, b: &Self, x: &[f64]) -> (f64, &'static str) {
        let mut worst = (0.0f64, "none");
        for (ea, eb) in a.subst.iter().zip(&b.subst) {
            let (u, v) = (ea.eval(x), eb.eval(x));
            let d = (u - v).abs() / u.abs().max(v.abs()).max(1.0);
            if !(d <= worst.0) {
                worst = (d, "substitution");
            }
        }
        let (u, v) = (a.log_amp.eval(x), b.log_amp.eval(x));
        let d = (u - v).abs() / u.abs().max(v.abs()).max(1.0);
        if !(d <= worst.0) {
            worst = (d, "amplitude");
        }
        let dp = a.phase.eval(x) - b.phase.eval(x);
        let d = (dp - dp.round()).abs();
        if !(d <= worst.0) {
            worst = (d, "phase");
        }
        worst
    }
}

/// Randomized equality: every canonical component agrees at `trials` points
/// drawn uniformly from `[-scale, scale]^dim` with a fixed seed.
pub fn equal_randomized(
    a: &AffinePhaseOp,
    b: &AffinePhaseOp,
    trials: usize,
    tol: f64,
    seed: u64,
) -> Result<EqualityReport> {
    equal_randomized_scaled(a, b, trials, tol, seed, 1.0)
}

pub fn equal_randomized_scaled(
    a: &AffinePhaseOp,
    b: &AffinePhaseOp,
    trials: usize,
    tol: f64,
    seed: u64,
    scale: f64,
) -> Result<EqualityReport> {
    if a.sig != b.sig {
        return Err(Error::Signature(format!("{} and {} act on different legs", a.name, b.name)));
    }
    if a.antilinear != b.antilinear {
        return Ok(EqualityReport {
            equal: false,
            max_defect: f64::INFINITY,
            witness: None,
            component: Some("antilinearity".into()),
        });
    }
    let mut rng = rng::stream(seed, "equal_randomized");
    let mut rep = EqualityReport { equal: true, max_defect: 0.0, witness: None, component: None };
    for _ in 0..trials {
        let x: Vec<f64> = (0..a.dim()).map(|_| rng.gen_range(-scale..scale)).collect();
        let (d, comp) = AffinePhaseOp::point_defect(a, b, &x);
        if !(d <= rep.max_defect) {
            rep.max_defect = d;
            rep.witness = Some(x);
            rep.component = Some(comp.into());
        }
    }
    rep.equal = rep.max_defect < tol;
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::exp;

    fn shift_op() -> AffinePhaseOp {
        let sig = LegSignature::plain(1, 1);
        AffinePhaseOp {
            name: "A".into(),
            sig,
            subst: vec![coord(0) - cst(0.3), exp(coord(2)) * coord(1), coord(2)],
            inverse_subst: Some(vec![coord(0) + cst(0.3), exp(-coord(2)) * coord(1), coord(2)]),
            log_amp: 0.5 * coord(2),
            phase: coord(0) * coord(1),
            antilinear: false,
        }
    }

    #[test]
    fn compose_matches_pointwise() {
        let a = shift_op();
        let mut b = shift_op();
        b.phase = coord(2) * coord(1) * coord(1);
        b.antilinear = true;
        let ab = AffinePhaseOp::compose(&a, &b).unwrap();
        let xi = |x: &[f64]| C64::new((-x[0] * x[0]).exp(), x[1] + 0.2 * x[2]);
        let x = [0.4, -0.7, 0.2];
        let direct = a.apply_pointwise(&|y: &[f64]| b.apply_pointwise(&xi, y), &x);
        assert!((ab.apply_pointwise(&xi, &x) - direct).norm() < 1e-14);
        assert!(ab.antilinear);
    }

    #[test]
    fn inverse_and_identity() {
        for anti in [false, true] {
            let mut a = shift_op();
            a.antilinear = anti;
            let ai = a.inverse().unwrap();
            let id = AffinePhaseOp::identity(&a.sig);
            let r = equal_randomized(&AffinePhaseOp::compose(&a, &ai).unwrap(), &id, 50, 1e-12, 1).unwrap();
            assert!(r.equal, "{r:?}");
            let r = equal_randomized(&AffinePhaseOp::compose(&ai, &a).unwrap(), &id, 50, 1e-12, 1).unwrap();
            assert!(r.equal, "{r:?}");
            let r = equal_randomized(&AffinePhaseOp::compose(&a, &id).unwrap(), &a, 50, 0.0, 1).unwrap();
            assert_eq!(r.max_defect, 0.0);
        }
        assert!(shift_op().inverse_defect(20, 3).unwrap() < 1e-14);
    }

    #[test]
    fn unitarity_accounting() {
        // Jacobian of S is e^{r}, amplitude e^{r/2}.
        assert!(shift_op().unitarity_defect(20, 2) < 1e-13);
        let mut b = shift_op();
        b.log_amp = coord(2);
        assert!(b.unitarity_defect(20, 2) > 1e-3);
    }

    #[test]
    fn embedding_rules() {
        let a = shift_op();
        let sig = LegSignature::plain(1, 3);
        let e = AffinePhaseOp::embed_legs(&a, &[2], &sig).unwrap();
        let x = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 0.1, 0.2, 0.3];
        let s = e.subst_at(&x);
        assert_eq!(&s[..6], &x[..6]);
        assert!((s[6] + 0.2).abs() < 1e-15);
        assert!(AffinePhaseOp::embed_legs(&a, &[3], &sig).is_err());
        let mut t = a.clone();
        t.antilinear = true;
        assert!(AffinePhaseOp::embed_legs(&t, &[0], &sig).is_err());
        // disjoint legs commute
        let e0 = AffinePhaseOp::embed_legs(&a, &[0], &sig).unwrap();
        let l = AffinePhaseOp::compose(&e0, &e).unwrap();
        let r = AffinePhaseOp::compose(&e, &e0).unwrap();
        assert!(equal_randomized(&l, &r, 30, 1e-13, 4).unwrap().equal);
        let id1 = AffinePhaseOp::identity(&LegSignature::plain(1, 1));
        let eid = AffinePhaseOp::embed_legs(&id1, &[1], &sig).unwrap();
        assert!(equal_randomized(&eid, &AffinePhaseOp::identity(&sig), 10, 1e-15, 4).unwrap().equal);
    }

    #[test]
    fn flip_is_involutive() {
        let sig = LegSignature::extended(1, 2);
        let s = AffinePhaseOp::flip(&sig).unwrap();
        let ss = AffinePhaseOp::compose(&s, &s).unwrap();
        assert!(equal_randomized(&ss, &AffinePhaseOp::identity(&sig), 10, 1e-15, 1).unwrap().equal);
        let x: Vec<f64> = (0..8).map(|i| i as f64).collect();
        assert_eq!(s.subst_at(&x), vec![4.0, 5.0, 6.0, 7.0, 0.0, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn unequal_ops_give_witness() {
        let a = shift_op();
        let mut b = shift_op();
        b.phase = coord(0) * coord(1) + 0.01 * coord(2);
        let r = equal_randomized(&a, &b, 20, 1e-9, 7).unwrap();
        assert!(!r.equal);
        assert!(r.witness.is_some());
        assert_eq!(r.component.as_deref(), Some("phase"));
    }
}
