//! Operator identities as measurable defects.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::affine::{equal_randomized, equal_randomized_scaled, AffinePhaseOp, EqualityReport, LegSignature};
use super::builders::*;
use super::gaussian::GaussianSliceVector;
use crate::algebra::ClosedFormFunction;
use crate::{rng, Result};

/// Where random evaluation points are drawn.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleBox {
    pub fast: f64,
    pub r: f64,
    pub w: f64,
}

impl Default for SampleBox {
    fn default() -> Self {
        Self { fast: 1.0, r: 0.2, w: 0.5 }
    }
}

fn sample_point(sig: &LegSignature, bx: SampleBox, rng: &mut impl Rng) -> Vec<f64> {
    let mut x: Vec<f64> = (0..sig.dim()).map(|_| rng.gen_range(-bx.fast..bx.fast)).collect();
    for l in 0..sig.num_legs() {
        x[sig.r(l)] = rng.gen_range(-bx.r..bx.r);
        if let Some(w) = sig.w(l) {
            x[w] = rng.gen_range(-bx.w..bx.w);
        }
    }
    x
}

/// Largest pointwise difference of two vectors relative to the largest value of `b`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VectorComparison {
    pub rel_defect: f64,
    pub max_abs: f64,
    pub witness: Option<Vec<f64>>,
}

pub fn compare_vectors(
    a: &GaussianSliceVector,
    b: &GaussianSliceVector,
    trials: usize,
    seed: u64,
    bx: SampleBox,
) -> Result<VectorComparison> {
    let mut rng = rng::stream(seed, "compare_vectors");
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    let mut witness = None;
    for _ in 0..trials {
        let x = sample_point(&a.sig, bx, &mut rng);
        let (u, v) = (a.eval(&x)?, b.eval(&x)?);
        scale = scale.max(v.norm());
        let d = (u - v).norm();
        if !(d <= worst) {
            worst = d;
            witness = Some(x);
        }
    }
    let rel = if scale > 0.0 { worst / scale } else { worst };
    Ok(VectorComparison { rel_defect: rel, max_abs: scale, witness })
}

fn emb(op: &AffinePhaseOp, which: &[usize], sig: &LegSignature) -> Result<AffinePhaseOp> {
    AffinePhaseOp::embed_legs(op, which, sig)
}

fn three(op: &AffinePhaseOp) -> LegSignature {
    LegSignature { n: op.sig.n, legs: vec![op.sig.legs[0]; 3] }
}

/// `U₁₂U₁₃U₂₃` against `U₂₃U₁₂`.
pub fn pentagon(u: &AffinePhaseOp, trials: usize, tol: f64, seed: u64) -> Result<EqualityReport> {
    let sig = three(u);
    let (u12, u13, u23) = (emb(u, &[0, 1], &sig)?, emb(u, &[0, 2], &sig)?, emb(u, &[1, 2], &sig)?);
    let lhs = AffinePhaseOp::compose_all(&[&u12, &u13, &u23])?;
    let rhs = AffinePhaseOp::compose(&u23, &u12)?;
    equal_randomized(&lhs, &rhs, trials, tol, seed)
}

/// `U = W V_σ`.
pub fn u_factorization(n: usize, lambda: f64, extended: bool, trials: usize, tol: f64, seed: u64) -> Result<EqualityReport> {
    let (u, w, v) = if extended {
        (u_ext(n, lambda), w_ext(n, lambda), v_sigma_ext(n, lambda))
    } else {
        (u_op(n, lambda), w_op(n, lambda), v_sigma(n, lambda))
    };
    equal_randomized(&u, &AffinePhaseOp::compose(&w, &v)?, trials, tol, seed)
}

/// `L_g L_{g′} = M·L_{g+g′}` with the cocycle multiplier `M`.
pub fn block_composition(n: usize, lambda: f64, g: (&[f64], &[f64], f64), h: (&[f64], &[f64], f64), trials: usize, tol: f64, seed: u64) -> Result<EqualityReport> {
    let lg = block_l(n, lambda, g.0, g.1, g.2)?;
    let lh = block_l(n, lambda, h.0, h.1, h.2)?;
    let a: Vec<f64> = g.0.iter().zip(h.0).map(|(u, v)| u + v).collect();
    let b: Vec<f64> = g.1.iter().zip(h.1).map(|(u, v)| u + v).collect();
    let lgh = block_l(n, lambda, &a, &b, g.2 + h.2)?;
    let m = block_cocycle(n, lambda, g.0, h.1)?;
    equal_randomized(&AffinePhaseOp::compose(&lg, &lh)?, &AffinePhaseOp::compose(&m, &lgh)?, trials, tol, seed)
}

/// Closed form of `Δ(L)` against `U(L⊗1)U*`.
pub fn delta_block(n: usize, lambda: f64, a: &[f64], b: &[f64], c: f64, trials: usize, tol: f64, seed: u64) -> Result<EqualityReport> {
    let closed = delta_l(n, lambda, a, b, c)?;
    let conj = comultiply(&u_op(n, lambda), &block_l(n, lambda, a, b, c)?)?;
    equal_randomized(&closed, &conj, trials, tol, seed)
}

/// Closed form of `Δ̃(L̃)` against `Ũ(L̃⊗1)Ũ*`.
pub fn delta_block_ext(n: usize, lambda: f64, a: &[f64], b: &[f64], c: f64, d: f64, trials: usize, tol: f64, seed: u64) -> Result<EqualityReport> {
    let closed = delta_l_ext(n, lambda, a, b, c, d)?;
    let conj = comultiply(&u_ext(n, lambda), &block_l_ext(n, lambda, a, b, c, d)?)?;
    equal_randomized(&closed, &conj, trials, tol, seed)
}

/// `Δ(L_g)Δ(L_{g′}) = Δ(M)Δ(L_{g+g′})`.
pub fn homomorphism(n: usize, lambda: f64, g: (&[f64], &[f64], f64), h: (&[f64], &[f64], f64), trials: usize, tol: f64, seed: u64) -> Result<EqualityReport> {
    let u = u_op(n, lambda);
    let dg = delta_l(n, lambda, g.0, g.1, g.2)?;
    let dh = delta_l(n, lambda, h.0, h.1, h.2)?;
    let a: Vec<f64> = g.0.iter().zip(h.0).map(|(u, v)| u + v).collect();
    let b: Vec<f64> = g.1.iter().zip(h.1).map(|(u, v)| u + v).collect();
    let dgh = delta_l(n, lambda, &a, &b, g.2 + h.2)?;
    let dm = comultiply(&u, &block_cocycle(n, lambda, g.0, h.1)?)?;
    equal_randomized(&AffinePhaseOp::compose(&dg, &dh)?, &AffinePhaseOp::compose(&dm, &dgh)?, trials, tol, seed)
}

/// `(Δ⊗id)Δ(X) = (id⊗Δ)Δ(X)` for a two-leg `X = Δ(L)`.
pub fn coassociativity(u: &AffinePhaseOp, delta_x: &AffinePhaseOp, trials: usize, tol: f64, seed: u64) -> Result<EqualityReport> {
    let sig = three(u);
    let (u12, u23) = (emb(u, &[0, 1], &sig)?, emb(u, &[1, 2], &sig)?);
    let x13 = emb(delta_x, &[0, 2], &sig)?;
    let x12 = emb(delta_x, &[0, 1], &sig)?;
    let lhs = AffinePhaseOp::compose_all(&[&u12, &x13, &u12.inverse()?])?;
    let rhs = AffinePhaseOp::compose_all(&[&u23, &x12, &u23.inverse()?])?;
    equal_randomized(&lhs, &rhs, trials, tol, seed)
}

/// `T² = 1`.
pub fn t_involution(n: usize, lambda: f64, trials: usize, tol: f64, seed: u64) -> Result<EqualityReport> {
    let t = t_op(n, lambda);
    equal_randomized(&AffinePhaseOp::compose(&t, &t)?, &AffinePhaseOp::identity(&t.sig), trials, tol, seed)
}

/// `(T⊗T)Δ(X)(T⊗T) = ΣΔ(TXT)Σ` for an affine one-leg `X`.
pub fn flip_identity_affine(n: usize, lambda: f64, x: &AffinePhaseOp, trials: usize, tol: f64, seed: u64) -> Result<EqualityReport> {
    let u = u_op(n, lambda);
    let t = t_op(n, lambda);
    let tt = tt_op(n, lambda);
    let lhs = AffinePhaseOp::compose_all(&[&tt, &comultiply(&u, x)?, &tt])?;
    let txt = AffinePhaseOp::compose_all(&[&t, x, &t])?;
    let rhs = comultiply(&u, &txt)?.flipped()?;
    equal_randomized(&lhs, &rhs, trials, tol, seed)
}

fn delta_chain(u: &AffinePhaseOp, x: &OpChain) -> Result<OpChain> {
    let x1 = x.embed_legs(&[0], &u.sig)?;
    Ok(OpChain::affine(u.clone()).then_after(&x1).then_after(&OpChain::affine(u.inverse()?)))
}

/// `T L_φ T = L_{φ†}` on a random Gaussian vector.
pub fn t_conjugation_kernel(lambda: f64, phi: &ClosedFormFunction, trials: usize, seed: u64) -> Result<VectorComparison> {
    let n = phi.n();
    let t = t_op(n, lambda);
    let v = GaussianSliceVector::random(&t.sig, &mut rng::stream(seed, "t_conj"));
    let lhs = v.apply_affine(&t)?.apply_kernel(&l_phi(lambda, phi)?)?.apply_affine(&t)?;
    let rhs = v.apply_kernel(&l_phi_dagger(lambda, phi)?)?;
    compare_vectors(&lhs, &rhs, trials, seed, SampleBox::default())
}

/// `(T⊗T)Δ(L_φ)(T⊗T) = ΣΔ(L_{φ†})Σ` on a random Gaussian vector.
pub fn flip_identity_kernel(lambda: f64, phi: &ClosedFormFunction, trials: usize, seed: u64) -> Result<VectorComparison> {
    let n = phi.n();
    let u = u_op(n, lambda);
    let tt = tt_op(n, lambda);
    let s = AffinePhaseOp::flip(&u.sig)?;
    let v = GaussianSliceVector::random(&u.sig, &mut rng::stream(seed, "flip_kernel"));
    let d = delta_chain(&u, &OpChain::new(vec![AnyOp::Kernel(l_phi(lambda, phi)?)]))?;
    let dd = delta_chain(&u, &OpChain::new(vec![AnyOp::Kernel(l_phi_dagger(lambda, phi)?)]))?;
    let lhs = v.apply_affine(&tt)?;
    let lhs = d.apply(&lhs)?.apply_affine(&tt)?;
    let rhs = v.apply_affine(&s)?;
    let rhs = dd.apply(&rhs)?.apply_affine(&s)?;
    compare_vectors(&lhs, &rhs, trials, seed, SampleBox::default())
}

/// Closed two-leg kernel against `U(L_φ⊗1)U*(1⊗L_g)`.
pub fn comultiplication_kernel_check(lambda: f64, phi: &ClosedFormFunction, g: &ClosedFormFunction, trials: usize, seed: u64) -> Result<VectorComparison> {
    let n = phi.n();
    let u = u_op(n, lambda);
    let v = GaussianSliceVector::random(&u.sig, &mut rng::stream(seed, "comult"));
    let lhs = v.apply_kernel(&comultiplication_kernel(lambda, phi, g)?)?;
    let lg2 = super::gaussian::QuadraticFourierOp::embed_legs(&l_direct(lambda, g)?, &[1], &u.sig)?;
    let d = delta_chain(&u, &OpChain::new(vec![AnyOp::Kernel(l_phi(lambda, phi)?)]))?;
    let rhs = d.apply(&v.apply_kernel(&lg2)?)?;
    compare_vectors(&lhs, &rhs, trials, seed, SampleBox::default())
}

fn ext_vector(n: usize, legs: usize, seed: u64, label: &str) -> GaussianSliceVector {
    GaussianSliceVector::random(&LegSignature::extended(n, legs), &mut rng::stream(seed, label))
}

/// `RR* = 1` and `R*R = 1`; the larger of the two defects.
pub fn r_unitarity(n: usize, lambda: f64, trials: usize, seed: u64) -> Result<VectorComparison> {
    let v = ext_vector(n, 2, seed, "r_unitarity");
    let (r, rs) = (r_matrix(n, lambda), r_matrix_adjoint(n, lambda));
    let a = compare_vectors(&r.apply(&rs.apply(&v)?)?, &v, trials, seed, SampleBox::default())?;
    let b = compare_vectors(&rs.apply(&r.apply(&v)?)?, &v, trials, seed + 1, SampleBox::default())?;
    Ok(if a.rel_defect >= b.rel_defect { a } else { b })
}

/// The four-variable kernel of `R` against its two-variable reduction.
pub fn r_kernel_reduction(n: usize, lambda: f64, trials: usize, seed: u64) -> Result<VectorComparison> {
    let v = ext_vector(n, 2, seed, "r_reduction");
    compare_vectors(&r_matrix(n, lambda).apply(&v)?, &r_matrix_reduced(n, lambda)?.apply(&v)?, trials, seed, SampleBox::default())
}

/// Closed form of `R Δ̃(L̃) R*` equals the flipped `Δ̃(L̃)` exactly.
pub fn opposite_block_symbolic(n: usize, lambda: f64, a: &[f64], b: &[f64], c: f64, d: f64, trials: usize, tol: f64, seed: u64) -> Result<EqualityReport> {
    let closed = r_conjugated_block(n, lambda, a, b, c, d)?;
    let flipped = delta_l_ext(n, lambda, a, b, c, d)?.flipped()?;
    equal_randomized(&closed, &flipped, trials, tol, seed)
}

/// `R Δ̃(L̃) R*` against the closed form, on a Gaussian vector.
pub fn almost_cocommutative(n: usize, lambda: f64, a: &[f64], b: &[f64], c: f64, d: f64, trials: usize, seed: u64) -> Result<VectorComparison> {
    let v = ext_vector(n, 2, seed, "cocommutative");
    let dl = delta_l_ext(n, lambda, a, b, c, d)?;
    let lhs = r_matrix(n, lambda).apply(&r_matrix_adjoint(n, lambda).apply(&v)?.apply_affine(&dl)?)?;
    let rhs = v.apply_affine(&r_conjugated_block(n, lambda, a, b, c, d)?)?;
    compare_vectors(&lhs, &rhs, trials, seed, SampleBox::default())
}

fn r_on(n: usize, lambda: f64, which: [usize; 2], sig: &LegSignature) -> Result<OpChain> {
    r_matrix(n, lambda).embed_legs(&which, sig)
}

/// `R₁₂R₁₃R₂₃ = R₂₃R₁₃R₁₂` on a Gaussian vector over three legs.
pub fn qybe(n: usize, lambda: f64, trials: usize, seed: u64) -> Result<VectorComparison> {
    let sig = LegSignature::extended(n, 3);
    let v = ext_vector(n, 3, seed, "qybe");
    let (r12, r13, r23) = (r_on(n, lambda, [0, 1], &sig)?, r_on(n, lambda, [0, 2], &sig)?, r_on(n, lambda, [1, 2], &sig)?);
    let lhs = r12.apply(&r13.apply(&r23.apply(&v)?)?)?;
    let rhs = r23.apply(&r13.apply(&r12.apply(&v)?)?)?;
    compare_vectors(&lhs, &rhs, trials, seed, SampleBox::default())
}

/// `(Δ̃⊗id)R = R₁₃R₂₃` and `(id⊗Δ̃)R = R₁₃R₁₂`; returns both comparisons.
pub fn quasitriangular(n: usize, lambda: f64, trials: usize, seed: u64) -> Result<(VectorComparison, VectorComparison)> {
    let sig = LegSignature::extended(n, 3);
    let v = ext_vector(n, 3, seed, "quasitriangular");
    let u = u_ext(n, lambda);
    let (u12, u23) = (AnyOp::Affine(emb(&u, &[0, 1], &sig)?), AnyOp::Affine(emb(&u, &[1, 2], &sig)?));
    let (u12i, u23i) = (
        AnyOp::Affine(emb(&u.inverse()?, &[0, 1], &sig)?),
        AnyOp::Affine(emb(&u.inverse()?, &[1, 2], &sig)?),
    );
    let (r12, r13, r23) = (r_on(n, lambda, [0, 1], &sig)?, r_on(n, lambda, [0, 2], &sig)?, r_on(n, lambda, [1, 2], &sig)?);
    let left = OpChain::new(vec![u12]).then_after(&r13).then_after(&OpChain::new(vec![u12i]));
    let a = compare_vectors(&left.apply(&v)?, &r13.apply(&r23.apply(&v)?)?, trials, seed, SampleBox::default())?;
    let right = OpChain::new(vec![u23]).then_after(&r12).then_after(&OpChain::new(vec![u23i]));
    let b = compare_vectors(&right.apply(&v)?, &r13.apply(&r12.apply(&v)?)?, trials, seed + 1, SampleBox::default())?;
    Ok((a, b))
}

/// `ΣRΣ` against `R*`; a large value shows the R-matrix is not involutive.
pub fn r21_vs_r_inverse(n: usize, lambda: f64, trials: usize, seed: u64) -> Result<VectorComparison> {
    let v = ext_vector(n, 2, seed, "r21");
    let s = AffinePhaseOp::flip(&LegSignature::extended(n, 2))?;
    let r21 = OpChain::affine(s.clone()).then_after(&r_matrix(n, lambda)).then_after(&OpChain::affine(s));
    compare_vectors(&r21.apply(&v)?, &r_matrix_adjoint(n, lambda).apply(&v)?, trials, seed, SampleBox::default())
}

/// `Φ·(Φ′·(F·Φ*)·Φ′*)` written with multiplier substitutions against the
/// closed form of `F ↦ RFR*`.
pub fn multiplier_consistency(n: usize, lambda: f64, trials: usize, tol: f64, seed: u64) -> Result<EqualityReport> {
    let chain = AffinePhaseOp::compose_all(&[
        &phi_left_mult(n, lambda),
        &phi_prime_left_mult(n, lambda),
        &phi_right_mult(n, lambda).inverse()?,
        &phi_prime_right_mult(n, lambda).inverse()?,
    ])?;
    equal_randomized_scaled(&chain, &psi_op(n, lambda), trials, tol, seed, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Bump;

    const LAMS: [f64; 3] = [0.7, -0.4, 1.3];

    fn phi() -> ClosedFormFunction {
        ClosedFormFunction::gaussian1([0.2, -0.1, 1.0, 1.1, 0.3, -0.2], Bump::new(0.0, 0.5))
    }

    fn g() -> ClosedFormFunction {
        ClosedFormFunction::gaussian1([-0.15, 0.25, 0.9, 1.0, -0.1, 0.25], Bump::new(0.0, 0.5))
    }

    #[test]
    fn pentagons() {
        for (i, &l) in LAMS.iter().enumerate() {
            for n in [1, 2] {
                let r = pentagon(&u_op(n, l), 50, 1e-10, i as u64).unwrap();
                assert!(r.equal, "U n={n} λ={l}: {r:?}");
                let r = pentagon(&u_ext(n, l), 50, 1e-10, i as u64).unwrap();
                assert!(r.equal, "Ũ n={n} λ={l}: {r:?}");
            }
        }
    }

    #[test]
    fn factorization_and_unitarity() {
        for &l in &LAMS {
            assert!(u_factorization(2, l, false, 40, 1e-12, 3).unwrap().equal);
            assert!(u_factorization(2, l, true, 40, 1e-12, 3).unwrap().equal);
            for op in [u_op(2, l), w_op(2, l), v_sigma(2, l), t_op(2, l), tt_op(2, l), u_ext(2, l), v_sigma_ext(2, l), w_ext(2, l), phi_op(2, l)] {
                assert!(op.unitarity_defect(20, 5) < 1e-12, "{}", op.name);
                assert!(op.inverse_defect(20, 5).unwrap() < 1e-12, "{}", op.name);
            }
        }
    }

    #[test]
    fn block_identities() {
        let (a, b) = ([0.3, -0.2], [0.5, 0.1]);
        let (a2, b2) = ([-0.4, 0.6], [0.2, -0.7]);
        for &l in &LAMS {
            assert!(block_composition(2, l, (&a, &b, 0.4), (&a2, &b2, -0.3), 40, 1e-11, 1).unwrap().equal);
            let r = delta_block(2, l, &a, &b, 0.4, 40, 1e-11, 2).unwrap();
            assert!(r.equal, "{r:?}");
            let r = delta_block_ext(2, l, &a, &b, 0.4, 0.3, 40, 1e-11, 2).unwrap();
            assert!(r.equal, "{r:?}");
            assert!(homomorphism(2, l, (&a, &b, 0.4), (&a2, &b2, -0.3), 40, 1e-10, 3).unwrap().equal);
            let dl = delta_l(2, l, &a, &b, 0.4).unwrap();
            let r = coassociativity(&u_op(2, l), &dl, 40, 1e-10, 4).unwrap();
            assert!(r.equal, "{r:?}");
            let dl = delta_l_ext(2, l, &a, &b, 0.4, 0.3).unwrap();
            assert!(coassociativity(&u_ext(2, l), &dl, 40, 1e-10, 4).unwrap().equal);
            assert!(t_involution(2, l, 20, 1e-12, 5).unwrap().equal);
            let x = block_l(2, l, &a, &b, 0.4).unwrap();
            let r = flip_identity_affine(2, l, &x, 40, 1e-10, 6).unwrap();
            assert!(r.equal, "{r:?}");
            let r = opposite_block_symbolic(2, l, &a, &b, 0.4, 0.3, 40, 1e-11, 7).unwrap();
            assert!(r.equal, "{r:?}");
            assert!(multiplier_consistency(2, l, 40, 1e-10, 8).unwrap().equal);
        }
    }

    #[test]
    fn kernel_identities() {
        let l = 0.7;
        let c = t_conjugation_kernel(l, &phi(), 30, 1).unwrap();
        assert!(c.rel_defect < 1e-9, "{c:?}");
        let c = flip_identity_kernel(l, &phi(), 30, 2).unwrap();
        assert!(c.rel_defect < 1e-9, "{c:?}");
        let c = comultiplication_kernel_check(l, &phi(), &g(), 30, 3).unwrap();
        assert!(c.rel_defect < 1e-9, "{c:?}");
    }

    #[test]
    fn r_matrix_identities() {
        for &l in &[0.6, -0.9] {
            let c = r_unitarity(1, l, 20, 1).unwrap();
            assert!(c.rel_defect < 1e-9, "{c:?}");
            let c = r_kernel_reduction(1, l, 20, 2).unwrap();
            assert!(c.rel_defect < 1e-9, "{c:?}");
            let c = almost_cocommutative(1, l, &[0.3], &[-0.5], 0.8, 0.4, 20, 3).unwrap();
            assert!(c.rel_defect < 1e-9, "{c:?}");
            let c = qybe(1, l, 20, 4).unwrap();
            assert!(c.rel_defect < 1e-9, "{c:?}");
            let (a, b) = quasitriangular(1, l, 20, 5).unwrap();
            assert!(a.rel_defect < 1e-9, "{a:?}");
            assert!(b.rel_defect < 1e-9, "{b:?}");
            let c = r21_vs_r_inverse(1, l, 20, 6).unwrap();
            assert!(c.rel_defect > 1e-2, "{c:?}");
        }
    }
}
