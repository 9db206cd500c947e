//! Complex Gaussian test vectors whose parameters depend on the slow
//! coordinates, and the exact action of affine and quadratic-kernel
//! operators on them.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::affine::{AffinePhaseOp, LegSignature};
use crate::expr::{coord, CoordExpr};
use crate::{Error, Result, C64};

/// `exp(−fᵀAf + bᵀf + c)` at one slow point.
#[derive(Clone, Debug)]
pub struct SliceParams {
    pub a: DMatrix<C64>,
    pub b: DVector<C64>,
    pub c: C64,
}

impl SliceParams {
    pub fn zero(dim: usize) -> Self {
        Self { a: DMatrix::identity(dim, dim), b: DVector::zeros(dim), c: C64::new(f64::NEG_INFINITY, 0.0) }
    }

    pub fn is_zero(&self) -> bool {
        self.c.re == f64::NEG_INFINITY
    }

    pub fn log_value(&self, f: &DVector<C64>) -> C64 {
        -(f.transpose() * &self.a * f)[(0, 0)] + (self.b.transpose() * f)[(0, 0)] + self.c
    }

    pub fn value(&self, f: &[f64]) -> C64 {
        if self.is_zero() {
            return C64::new(0.0, 0.0);
        }
        let fv = DVector::from_iterator(f.len(), f.iter().map(|&v| C64::new(v, 0.0)));
        self.log_value(&fv).exp()
    }

    pub fn conj(&self) -> Self {
        Self { a: self.a.map(|z| z.conj()), b: self.b.map(|z| z.conj()), c: self.c.conj() }
    }
}

type ParamFn = dyn Fn(&[f64]) -> SliceParams + Send + Sync;

enum Node {
    Base(Arc<ParamFn>),
    Affine(AffinePhaseOp, GaussianSliceVector),
    Kernel(QuadraticFourierOp, GaussianSliceVector),
}

/// A vector that is Gaussian in the fast coordinates on every slice.
#[derive(Clone)]
pub struct GaussianSliceVector {
    pub sig: LegSignature,
    node: Arc<Node>,
}

impl std::fmt::Debug for GaussianSliceVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "GaussianSliceVector({:?}, depth {})", self.sig.legs, self.depth())
    }
}

fn split(sig: &LegSignature, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let f = sig.fast_indices().iter().map(|&i| x[i]).collect();
    let s = sig.slow_indices().iter().map(|&i| x[i]).collect();
    (f, s)
}

fn join(sig: &LegSignature, f: &[f64], s: &[f64]) -> Vec<f64> {
    let mut x = vec![0.0; sig.dim()];
    for (k, &i) in sig.fast_indices().iter().enumerate() {
        x[i] = f[k];
    }
    for (k, &i) in sig.slow_indices().iter().enumerate() {
        x[i] = s[k];
    }
    x
}

/// `q(u) = uᵀQu + βᵀu + γ` recovered from values at `0`, `±e_i`, `e_i+e_j`.
pub fn quad_extract(q: &dyn Fn(&[f64]) -> C64, dim: usize) -> (DMatrix<C64>, DVector<C64>, C64) {
    let c0 = q(&vec![0.0; dim]);
    let unit = |i: usize, s: f64| {
        let mut u = vec![0.0; dim];
        u[i] = s;
        u
    };
    let qp: Vec<C64> = (0..dim).map(|i| q(&unit(i, 1.0))).collect();
    let qm: Vec<C64> = (0..dim).map(|i| q(&unit(i, -1.0))).collect();
    let mut a = DMatrix::zeros(dim, dim);
    let mut b = DVector::zeros(dim);
    for i in 0..dim {
        a[(i, i)] = (qp[i] + qm[i] - 2.0 * c0) / 2.0;
        b[i] = (qp[i] - qm[i]) / 2.0;
    }
    for i in 0..dim {
        for j in i + 1..dim {
            let mut u = vec![0.0; dim];
            u[i] = 1.0;
            u[j] = 1.0;
            let v = (q(&u) - qp[i] - qp[j] + c0) / 2.0;
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
    }
    (a, b, c0)
}

fn quad_eval(a: &DMatrix<C64>, b: &DVector<C64>, c: C64, u: &[f64]) -> C64 {
    let uv = DVector::from_iterator(u.len(), u.iter().map(|&v| C64::new(v, 0.0)));
    (uv.transpose() * a * &uv)[(0, 0)] + (b.transpose() * &uv)[(0, 0)] + c
}

/// Deterministic off-lattice probe point used to validate extractions.
fn probe(dim: usize) -> Vec<f64> {
    (0..dim).map(|i| 0.37 + 0.113 * i as f64 - 0.05 * (i * i) as f64 % 0.7).collect()
}

fn close(a: C64, b: C64, scale: f64) -> bool {
    (a - b).norm() <= 1e-8 * scale.max(1.0)
}

/// Branch of `√det B` continuous along `(1−t)I + tB`, `t ∈ [0,1]`.
pub fn sqrt_det_path(b: &DMatrix<C64>) -> Result<C64> {
    let m = b.nrows();
    let id = DMatrix::<C64>::identity(m, m);
    let det_at = |t: f64| (&id * C64::new(1.0 - t, 0.0) + b * C64::new(t, 0.0)).determinant();
    let mut t: f64 = 0.0;
    let mut prev_det = C64::new(1.0, 0.0);
    let mut root = C64::new(1.0, 0.0);
    let mut h: f64 = 1.0 / 16.0;
    while t < 1.0 {
        let tn = (t + h).min(1.0);
        let d = det_at(tn);
        if d.norm() == 0.0 || !d.is_finite() {
            return Err(Error::SingularSlice { slow: vec![], reason: "determinant vanishes on the path".into() });
        }
        let ratio = d / prev_det;
        if ratio.arg().abs() > PI / 4.0 && h > 1e-9 {
            h /= 2.0;
            continue;
        }
        let mut s = d.sqrt();
        if (s - root).norm() > (-s - root).norm() {
            s = -s;
        }
        root = s;
        prev_det = d;
        t = tn;
        h = (h * 2.0).min(1.0 / 16.0);
    }
    Ok(root)
}

/// `out(X) = ∫dz exp(log_mag − 2πi·phase)(X,z)·ξ(S_in(X,z))`, where the
/// auxiliary coordinates `z` are numbered after the leg coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadraticFourierOp {
    pub name: String,
    pub sig: LegSignature,
    pub aux: usize,
    pub log_mag: CoordExpr,
    pub phase: CoordExpr,
    pub input_subst: Vec<CoordExpr>,
}

impl QuadraticFourierOp {
    pub fn embed_legs(op: &Self, which: &[usize], target: &LegSignature) -> Result<Self> {
        let shell = AffinePhaseOp::identity(&op.sig);
        // Reuse the affine embedding to validate indices and build the coordinate map.
        AffinePhaseOp::embed_legs(&shell, which, target)?;
        let local_to_global: Vec<usize> = which
            .iter()
            .flat_map(|&l| (0..target.leg_width(l)).map(move |i| target.offset(l) + i))
            .collect();
        let d_local = op.sig.dim();
        let d_global = target.dim();
        let map = |i: usize| if i < d_local { local_to_global[i] } else { d_global + (i - d_local) };
        let mut input: Vec<CoordExpr> = (0..d_global).map(coord).collect();
        for (i, e) in op.input_subst.iter().enumerate() {
            input[local_to_global[i]] = e.reindex(&map);
        }
        let suffix: Vec<String> = which.iter().map(|l| (l + 1).to_string()).collect();
        Ok(Self {
            name: format!("{}_{}", op.name, suffix.join("")),
            sig: target.clone(),
            aux: op.aux,
            log_mag: op.log_mag.reindex(&map),
            phase: op.phase.reindex(&map),
            input_subst: input,
        })
    }
}

impl GaussianSliceVector {
    pub fn from_fn(sig: &LegSignature, f: impl Fn(&[f64]) -> SliceParams + Send + Sync + 'static) -> Self {
        Self { sig: sig.clone(), node: Arc::new(Node::Base(Arc::new(f))) }
    }

    /// `exp(−½|f|²)` on every slice with a Gaussian envelope `exp(−½|s|²)` in the slow coordinates.
    pub fn standard(sig: &LegSignature) -> Self {
        let nf = sig.fast_indices().len();
        Self::from_fn(sig, move |s| {
            let c = -0.5 * s.iter().map(|v| v * v).sum::<f64>();
            SliceParams {
                a: DMatrix::identity(nf, nf) * C64::new(0.5, 0.0),
                b: DVector::zeros(nf),
                c: C64::new(c, 0.0),
            }
        })
    }

    /// Random complex Gaussian with `Re A ≻ 0` and slow-dependent linear and constant terms.
    pub fn random(sig: &LegSignature, rng: &mut ChaCha8Rng) -> Self {
        let nf = sig.fast_indices().len();
        let ns = sig.slow_indices().len();
        let mut normal = || -> f64 {
            let u: f64 = rng.gen_range(1e-12..1.0);
            let v: f64 = rng.gen_range(0.0..1.0);
            (-2.0 * u.ln()).sqrt() * (2.0 * PI * v).cos()
        };
        let g = DMatrix::<f64>::from_fn(nf, nf, |_, _| normal());
        let h = DMatrix::<f64>::from_fn(nf, nf, |_, _| 0.3 * normal());
        let re = &g * g.transpose() / nf as f64 + DMatrix::identity(nf, nf) * 0.5;
        let im = &h + h.transpose();
        let a0 = DMatrix::from_fn(nf, nf, |i, j| C64::new(re[(i, j)], im[(i, j)]));
        let b0 = DVector::from_fn(nf, |_, _| C64::new(normal(), normal()));
        let w = DMatrix::<f64>::from_fn(ns, nf, |_, _| 0.2 * normal());
        let c_im: Vec<f64> = (0..ns).map(|_| 0.3 * normal()).collect();
        Self::from_fn(sig, move |s| {
            let mut b = b0.clone();
            for j in 0..nf {
                let lin: f64 = (0..ns).map(|k| s[k] * w[(k, j)]).sum();
                b[j] += C64::new(lin, lin);
            }
            let c_re = -0.5 * s.iter().map(|v| v * v).sum::<f64>();
            let c_im: f64 = s.iter().zip(&c_im).map(|(a, b)| a * b).sum();
            SliceParams { a: a0.clone(), b, c: C64::new(c_re, c_im) }
        })
    }

    pub fn depth(&self) -> usize {
        match &*self.node {
            Node::Base(_) => 0,
            Node::Affine(_, v) | Node::Kernel(_, v) => 1 + v.depth(),
        }
    }

    pub fn params(&self, slow: &[f64]) -> Result<SliceParams> {
        match &*self.node {
            Node::Base(f) => Ok(f(slow)),
            Node::Affine(op, v) => affine_params(op, v, slow),
            Node::Kernel(op, v) => kernel_params(op, v, slow),
        }
    }

    pub fn eval(&self, x: &[f64]) -> Result<C64> {
        let (f, s) = split(&self.sig, x);
        Ok(self.params(&s)?.value(&f))
    }

    pub fn apply_affine(&self, op: &AffinePhaseOp) -> Result<Self> {
        if op.sig != self.sig {
            return Err(Error::Signature(format!("{} does not act on this vector", op.name)));
        }
        Ok(Self { sig: self.sig.clone(), node: Arc::new(Node::Affine(op.clone(), self.clone())) })
    }

    pub fn apply_kernel(&self, op: &QuadraticFourierOp) -> Result<Self> {
        if op.sig != self.sig {
            return Err(Error::Signature(format!("{} does not act on this vector", op.name)));
        }
        Ok(Self { sig: self.sig.clone(), node: Arc::new(Node::Kernel(op.clone(), self.clone())) })
    }
}

fn slow_image(sig: &LegSignature, subst: &[CoordExpr], x: &[f64]) -> Vec<f64> {
    sig.slow_indices().iter().map(|&i| subst[i].eval(x)).collect()
}

fn affine_params(op: &AffinePhaseOp, v: &GaussianSliceVector, s: &[f64]) -> Result<SliceParams> {
    let sig = &op.sig;
    let fast = sig.fast_indices();
    let nf = fast.len();
    let x0 = join(sig, &vec![0.0; nf], s);
    let s_in = slow_image(sig, &op.subst, &x0);
    let pr = probe(nf);
    let xp = join(sig, &pr, s);
    if slow_image(sig, &op.subst, &xp).iter().zip(&s_in).any(|(a, b)| (a - b).abs() > 1e-12 * b.abs().max(1.0)) {
        return Err(Error::Unsupported(format!("{}: slow coordinates depend on fast ones", op.name)));
    }
    let inner = v.params(&s_in)?;
    let la0 = op.log_amp.eval(&x0);
    if inner.is_zero() || la0 == f64::NEG_INFINITY {
        return Ok(SliceParams::zero(nf));
    }
    let inner = if op.antilinear { inner.conj() } else { inner };
    let fast_image = |f: &[f64]| -> Vec<f64> {
        let x = join(sig, f, s);
        fast.iter().map(|&i| op.subst[i].eval(&x)).collect()
    };
    let t = fast_image(&vec![0.0; nf]);
    let mut m = DMatrix::<f64>::zeros(nf, nf);
    for j in 0..nf {
        let mut e = vec![0.0; nf];
        e[j] = 1.0;
        let col = fast_image(&e);
        for i in 0..nf {
            m[(i, j)] = col[i] - t[i];
        }
    }
    let img = fast_image(&pr);
    for i in 0..nf {
        let pred: f64 = t[i] + (0..nf).map(|j| m[(i, j)] * pr[j]).sum::<f64>();
        if (pred - img[i]).abs() > 1e-9 * img[i].abs().max(1.0) {
            return Err(Error::Unsupported(format!("{}: substitution not affine in fast coordinates", op.name)));
        }
    }
    let ph = |f: &[f64]| C64::new(op.phase.eval(&join(sig, f, s)), 0.0);
    let la = |f: &[f64]| C64::new(op.log_amp.eval(&join(sig, f, s)), 0.0);
    let (p, g, h) = quad_extract(&ph, nf);
    let (pa, ga, ha) = quad_extract(&la, nf);
    if !close(quad_eval(&p, &g, h, &pr), ph(&pr), h.norm()) || !close(quad_eval(&pa, &ga, ha, &pr), la(&pr), ha.norm()) {
        return Err(Error::Unsupported(format!("{}: phase or amplitude not quadratic in fast coordinates", op.name)));
    }
    let mc = m.map(|v| C64::new(v, 0.0));
    let tc = DVector::from_iterator(nf, t.iter().map(|&v| C64::new(v, 0.0)));
    let two_pi_i = C64::new(0.0, 2.0 * PI);
    let am = &inner.a * &mc;
    let a2 = mc.transpose() * &am + &p * two_pi_i - &pa;
    let at = &inner.a * &tc;
    let b2 = mc.transpose() * &inner.b - (mc.transpose() * &at) * C64::new(2.0, 0.0) - &g * two_pi_i + &ga;
    let c2 = inner.c - (tc.transpose() * &at)[(0, 0)] + (inner.b.transpose() * &tc)[(0, 0)] - two_pi_i * h + ha;
    Ok(SliceParams { a: a2, b: b2, c: c2 })
}

fn kernel_params(op: &QuadraticFourierOp, v: &GaussianSliceVector, s: &[f64]) -> Result<SliceParams> {
    let sig = &op.sig;
    let fast = sig.fast_indices();
    let nf = fast.len();
    let m = op.aux;
    let full = |u: &[f64]| -> Vec<f64> {
        let mut x = join(sig, &u[..nf], s);
        x.extend_from_slice(&u[nf..]);
        x
    };
    let u0 = vec![0.0; nf + m];
    let s_in = slow_image(sig, &op.input_subst, &full(&u0));
    let pr = probe(nf + m);
    if slow_image(sig, &op.input_subst, &full(&pr)).iter().zip(&s_in).any(|(a, b)| (a - b).abs() > 1e-12 * b.abs().max(1.0)) {
        return Err(Error::Unsupported(format!("{}: slow coordinates depend on fast ones", op.name)));
    }
    let inner = v.params(&s_in)?;
    if inner.is_zero() || op.log_mag.eval(&full(&u0)) == f64::NEG_INFINITY {
        return Ok(SliceParams::zero(nf));
    }
    let total = |u: &[f64]| -> C64 {
        let x = full(u);
        let fi: Vec<f64> = fast.iter().map(|&i| op.input_subst[i].eval(&x)).collect();
        let fv = DVector::from_iterator(nf, fi.iter().map(|&v| C64::new(v, 0.0)));
        C64::new(op.log_mag.eval(&x), -2.0 * PI * op.phase.eval(&x)) + inner.log_value(&fv)
    };
    let (q, beta, gamma) = quad_extract(&total, nf + m);
    if !close(quad_eval(&q, &beta, gamma, &pr), total(&pr), gamma.norm()) {
        return Err(Error::Unsupported(format!("{}: kernel exponent not quadratic", op.name)));
    }
    let b = -q;
    let bff = b.view((0, 0), (nf, nf)).into_owned();
    let bfz = b.view((0, nf), (nf, m)).into_owned();
    let bzz = b.view((nf, nf), (m, m)).into_owned();
    let bf = beta.rows(0, nf).into_owned();
    let bz = beta.rows(nf, m).into_owned();
    let singular = |reason: &str| Error::SingularSlice { slow: s.to_vec(), reason: reason.into() };
    let bzz_inv = bzz.clone().try_inverse().ok_or_else(|| singular("auxiliary form not invertible"))?;
    let a2 = &bff - &bfz * &bzz_inv * bfz.transpose();
    let b2 = &bf - &bfz * (&bzz_inv * &bz);
    let sd = sqrt_det_path(&bzz).map_err(|_| singular("determinant vanishes along the continuation path"))?;
    let c2 = gamma + (bz.transpose() * &bzz_inv * &bz)[(0, 0)] * 0.25 + C64::new(0.5 * m as f64 * PI.ln(), 0.0) - sd.ln();
    Ok(SliceParams { a: a2, b: b2, c: c2 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{cst, exp};
    use crate::rng;

    #[test]
    fn fresnel_value() {
        let b = DMatrix::from_element(1, 1, C64::new(0.0, -PI));
        let v = PI.sqrt() / sqrt_det_path(&b).unwrap();
        assert!((v - C64::from_polar(1.0, PI / 4.0)).norm() < 1e-10);
        let b = DMatrix::from_element(1, 1, C64::new(0.0, PI));
        let v = PI.sqrt() / sqrt_det_path(&b).unwrap();
        assert!((v - C64::from_polar(1.0, -PI / 4.0)).norm() < 1e-10);
    }

    #[test]
    fn fresnel_through_kernel() {
        // out = ∫ e^{iπt²} dt as the constant of a 1-aux kernel acting on the constant vector.
        let sig = LegSignature::plain(1, 1);
        let op = QuadraticFourierOp {
            name: "fresnel".into(),
            sig: sig.clone(),
            aux: 1,
            log_mag: cst(0.0),
            phase: -0.5 * (coord(3) * coord(3)),
            input_subst: (0..3).map(coord).collect(),
        };
        let one = GaussianSliceVector::from_fn(&sig, |_| SliceParams {
            a: DMatrix::zeros(2, 2),
            b: DVector::zeros(2),
            c: C64::new(0.0, 0.0),
        });
        let out = one.apply_kernel(&op).unwrap().eval(&[0.1, 0.2, 0.3]).unwrap();
        assert!((out - C64::from_polar(1.0, PI / 4.0)).norm() < 1e-10);
    }

    #[test]
    fn affine_matches_pointwise() {
        let sig = LegSignature::plain(1, 2);
        let mut r = rng::stream(11, "t");
        let v = GaussianSliceVector::random(&sig, &mut r);
        for anti in [false, true] {
            let op = AffinePhaseOp {
                name: "t".into(),
                sig: sig.clone(),
                subst: vec![
                    exp(-0.7 * coord(5)) * coord(0) + coord(3),
                    coord(1) - cst(0.2),
                    coord(2) + coord(5),
                    coord(3) - coord(0),
                    exp(coord(2)) * coord(4),
                    coord(5),
                ],
                inverse_subst: None,
                log_amp: -0.7 * coord(5),
                phase: coord(0) * coord(4) * coord(2) + coord(1),
                antilinear: anti,
            };
            let w = v.apply_affine(&op).unwrap();
            let xi = |x: &[f64]| v.eval(x).unwrap();
            for k in 0..16 {
                let x: Vec<f64> = (0..6).map(|i| ((i * 7 + k * 3) % 11) as f64 / 11.0 - 0.4).collect();
                let a = w.eval(&x).unwrap();
                let b = op.apply_pointwise(&xi, &x);
                assert!((a - b).norm() <= 1e-12 * b.norm().max(1e-300), "{a} vs {b}");
            }
        }
    }

    #[test]
    fn non_affine_rejected() {
        let sig = LegSignature::plain(1, 1);
        let mut op = AffinePhaseOp::identity(&sig);
        op.subst[0] = coord(0) * coord(1);
        let v = GaussianSliceVector::standard(&sig).apply_affine(&op).unwrap();
        assert!(matches!(v.eval(&[0.1, 0.2, 0.3]), Err(Error::Unsupported(_))));
    }
}
