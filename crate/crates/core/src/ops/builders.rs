//! Named operators of the quantum group, written as substitution/phase data
//! or as quadratic Fourier kernels. All builders use ℏ = 1.

use serde::{Deserialize, Serialize};

use super::affine::{AffinePhaseOp, LegCoords, LegSignature};
use super::gaussian::{GaussianSliceVector, QuadraticFourierOp};
use crate::algebra::ClosedFormFunction;
use crate::expr::{coord, cst, dot, eta_of, exp, CoordExpr};
use crate::{Error, Result};

fn consts(v: &[f64]) -> Vec<CoordExpr> {
    v.iter().map(|&a| cst(a)).collect()
}

fn scaled(s: &CoordExpr, v: &[CoordExpr]) -> Vec<CoordExpr> {
    v.iter().map(|e| s.clone() * e.clone()).collect()
}

fn plus(a: &[CoordExpr], b: &[CoordExpr]) -> Vec<CoordExpr> {
    a.iter().zip(b).map(|(u, v)| u.clone() + v.clone()).collect()
}

fn minus(a: &[CoordExpr], b: &[CoordExpr]) -> Vec<CoordExpr> {
    a.iter().zip(b).map(|(u, v)| u.clone() - v.clone()).collect()
}

fn beta(a: &[CoordExpr], b: &[CoordExpr]) -> CoordExpr {
    dot(a.to_vec(), b.to_vec())
}

fn check_len(n: usize, v: &[f64]) -> Result<()> {
    if v.len() != n {
        return Err(Error::Dimension { expected: n, got: v.len() });
    }
    Ok(())
}

/// Concatenates leg-local pieces into a full substitution vector.
fn assemble(legs: Vec<(Vec<CoordExpr>, Vec<CoordExpr>, CoordExpr, Option<CoordExpr>)>) -> Vec<CoordExpr> {
    let mut out = Vec::new();
    for (x, y, r, w) in legs {
        out.extend(x);
        out.extend(y);
        out.push(r);
        out.extend(w);
    }
    out
}

fn op(
    name: &str,
    sig: LegSignature,
    subst: Vec<CoordExpr>,
    inverse: Vec<CoordExpr>,
    log_amp: CoordExpr,
    phase: CoordExpr,
    antilinear: bool,
) -> AffinePhaseOp {
    AffinePhaseOp { name: name.into(), sig, subst, inverse_subst: Some(inverse), log_amp, phase, antilinear }
}

fn two(sig: &LegSignature) -> (LegCoords, LegCoords) {
    (sig.leg_coords(0), sig.leg_coords(1))
}

// ---------------------------------------------------------------- plain legs

/// `L_{a,b,c}` on one plain leg.
pub fn block_l(n: usize, lambda: f64, a: &[f64], b: &[f64], c: f64) -> Result<AffinePhaseOp> {
    check_len(n, a)?;
    check_len(n, b)?;
    let sig = LegSignature::plain(n, 1);
    let l = sig.leg_coords(0);
    let (ac, bc) = (consts(a), consts(b));
    let phase = c * l.r.clone() + eta_of(lambda, l.r.clone()) * beta(&ac, &minus(&l.y, &bc));
    let subst = assemble(vec![(minus(&l.x, &ac), minus(&l.y, &bc), l.r.clone(), None)]);
    let inv = assemble(vec![(plus(&l.x, &ac), plus(&l.y, &bc), l.r.clone(), None)]);
    Ok(op("L", sig, subst, inv, cst(0.0), phase, false))
}

/// Multiplication by `ē[η(r)·β(a, b′)]`, the cocycle of `L_g L_{g′}`.
pub fn block_cocycle(n: usize, lambda: f64, a: &[f64], b_prime: &[f64]) -> Result<AffinePhaseOp> {
    check_len(n, a)?;
    check_len(n, b_prime)?;
    let sig = LegSignature::plain(n, 1);
    let l = sig.leg_coords(0);
    let phase = eta_of(lambda, l.r.clone()) * beta(&consts(a), &consts(b_prime));
    let mut m = AffinePhaseOp::identity(&sig).named("M");
    m.phase = phase;
    Ok(m)
}

/// The untwisted unitary `V` on two plain legs.
pub fn v_op(n: usize) -> AffinePhaseOp {
    v_like(n, "V", |r| r)
}

/// `V_σ`: as `V` with `r′` replaced by `η(r′)` in the phase.
pub fn v_sigma(n: usize, lambda: f64) -> AffinePhaseOp {
    v_like(n, "V_σ", move |r| eta_of(lambda, r))
}

fn v_like(n: usize, name: &str, weight: impl Fn(CoordExpr) -> CoordExpr) -> AffinePhaseOp {
    let sig = LegSignature::plain(n, 2);
    let (a, b) = two(&sig);
    let phase = weight(b.r.clone()) * beta(&a.x, &minus(&b.y, &a.y));
    let subst = assemble(vec![
        (a.x.clone(), a.y.clone(), a.r.clone() + b.r.clone(), None),
        (minus(&b.x, &a.x), minus(&b.y, &a.y), b.r.clone(), None),
    ]);
    let inv = assemble(vec![
        (a.x.clone(), a.y.clone(), a.r.clone() - b.r.clone(), None),
        (plus(&b.x, &a.x), plus(&b.y, &a.y), b.r.clone(), None),
    ]);
    op(name, sig, subst, inv, cst(0.0), phase, false)
}

/// `W`: dilation of the first leg by `e^{−λr′}`.
pub fn w_op(n: usize, lambda: f64) -> AffinePhaseOp {
    let sig = LegSignature::plain(n, 2);
    let (a, b) = two(&sig);
    let e = exp(-lambda * b.r.clone());
    let ei = exp(lambda * b.r.clone());
    let subst = assemble(vec![
        (scaled(&e, &a.x), scaled(&e, &a.y), a.r.clone(), None),
        (b.x.clone(), b.y.clone(), b.r.clone(), None),
    ]);
    let inv = assemble(vec![
        (scaled(&ei, &a.x), scaled(&ei, &a.y), a.r.clone(), None),
        (b.x.clone(), b.y.clone(), b.r.clone(), None),
    ]);
    op("W", sig, subst, inv, (-(n as f64) * lambda) * b.r.clone(), cst(0.0), false)
}

/// The multiplicative unitary `U`, from its closed form.
pub fn u_op(n: usize, lambda: f64) -> AffinePhaseOp {
    let sig = LegSignature::plain(n, 2);
    let (a, b) = two(&sig);
    let e = exp(-lambda * b.r.clone());
    let ei = exp(lambda * b.r.clone());
    let (ex, ey) = (scaled(&e, &a.x), scaled(&e, &a.y));
    let phase = eta_of(lambda, b.r.clone()) * beta(&ex, &minus(&b.y, &ey));
    let subst = assemble(vec![
        (ex.clone(), ey.clone(), a.r.clone() + b.r.clone(), None),
        (minus(&b.x, &ex), minus(&b.y, &ey), b.r.clone(), None),
    ]);
    let inv = assemble(vec![
        (scaled(&ei, &a.x), scaled(&ei, &a.y), a.r.clone() - b.r.clone(), None),
        (plus(&b.x, &a.x), plus(&b.y, &a.y), b.r.clone(), None),
    ]);
    op("U", sig, subst, inv, (-(n as f64) * lambda) * b.r.clone(), phase, false)
}

/// The antiunitary `T` on one plain leg.
pub fn t_op(n: usize, lambda: f64) -> AffinePhaseOp {
    let sig = LegSignature::plain(n, 1);
    let l = sig.leg_coords(0);
    let e = exp(lambda * l.r.clone());
    let subst = assemble(vec![(scaled(&e, &l.x), scaled(&e, &l.y), -l.r.clone(), None)]);
    op("T", sig, subst.clone(), subst, (n as f64 * lambda) * l.r.clone(), cst(0.0), true)
}

/// `T⊗T` as a single antiunitary operator on two plain legs.
pub fn tt_op(n: usize, lambda: f64) -> AffinePhaseOp {
    let sig = LegSignature::plain(n, 2);
    let (a, b) = two(&sig);
    let ea = exp(lambda * a.r.clone());
    let eb = exp(lambda * b.r.clone());
    let subst = assemble(vec![
        (scaled(&ea, &a.x), scaled(&ea, &a.y), -a.r.clone(), None),
        (scaled(&eb, &b.x), scaled(&eb, &b.y), -b.r.clone(), None),
    ]);
    let la = (n as f64 * lambda) * (a.r.clone() + b.r.clone());
    op("T⊗T", sig, subst.clone(), subst, la, cst(0.0), true)
}

/// `Δ(L_{a,b,c})` from its closed form.
pub fn delta_l(n: usize, lambda: f64, a: &[f64], b: &[f64], c: f64) -> Result<AffinePhaseOp> {
    check_len(n, a)?;
    check_len(n, b)?;
    let sig = LegSignature::plain(n, 2);
    let (u, v) = two(&sig);
    let (ac, bc) = (consts(a), consts(b));
    let e = exp(-lambda * v.r.clone());
    let ei = exp(lambda * v.r.clone());
    let ey = scaled(&e, &u.y);
    let phase = eta_of(lambda, u.r.clone() + v.r.clone()) * beta(&ac, &minus(&ey, &bc))
        + eta_of(lambda, v.r.clone()) * beta(&ac, &minus(&v.y, &ey))
        + c * (u.r.clone() + v.r.clone());
    let subst = assemble(vec![
        (minus(&u.x, &scaled(&ei, &ac)), minus(&u.y, &scaled(&ei, &bc)), u.r.clone(), None),
        (minus(&v.x, &ac), minus(&v.y, &bc), v.r.clone(), None),
    ]);
    let inv = assemble(vec![
        (plus(&u.x, &scaled(&ei, &ac)), plus(&u.y, &scaled(&ei, &bc)), u.r.clone(), None),
        (plus(&v.x, &ac), plus(&v.y, &bc), v.r.clone(), None),
    ]);
    Ok(op("ΔL", sig, subst, inv, cst(0.0), phase, false))
}

/// `Δ(X) = U(X⊗1)U*` for an operator on one leg.
pub fn comultiply(u: &AffinePhaseOp, x: &AffinePhaseOp) -> Result<AffinePhaseOp> {
    let x1 = AffinePhaseOp::embed_legs(x, &[0], &u.sig)?;
    let mut out = AffinePhaseOp::compose_all(&[u, &x1, &u.inverse()?])?;
    out.name = format!("Δ({})", x.name);
    Ok(out)
}

// ------------------------------------------------------------- extended legs

/// `L_{a,b,c,d}` on one extended leg.
pub fn block_l_ext(n: usize, lambda: f64, a: &[f64], b: &[f64], c: f64, d: f64) -> Result<AffinePhaseOp> {
    check_len(n, a)?;
    check_len(n, b)?;
    let sig = LegSignature::extended(n, 1);
    let l = sig.leg_coords(0);
    let w = l.w.clone().unwrap();
    let (ac, bc) = (consts(a), consts(b));
    let (em, ep) = (cst((-d).exp()), cst(d.exp()));
    let phase = c * l.r.clone() + eta_of(lambda, l.r.clone()) * beta(&ac, &minus(&l.y, &bc));
    let subst = assemble(vec![(
        scaled(&em, &minus(&l.x, &ac)),
        scaled(&ep, &minus(&l.y, &bc)),
        l.r.clone(),
        Some(w.clone() - cst(d)),
    )]);
    let inv = assemble(vec![(
        plus(&scaled(&ep, &l.x), &ac),
        plus(&scaled(&em, &l.y), &bc),
        l.r.clone(),
        Some(w + cst(d)),
    )]);
    Ok(op("L̃", sig, subst, inv, cst(0.0), phase, false))
}

/// `W̃` on two extended legs.
pub fn w_ext(n: usize, lambda: f64) -> AffinePhaseOp {
    let sig = LegSignature::extended(n, 2);
    let (a, b) = two(&sig);
    let e = exp(-lambda * b.r.clone());
    let ei = exp(lambda * b.r.clone());
    let rest = (b.x.clone(), b.y.clone(), b.r.clone(), b.w.clone());
    let subst = assemble(vec![(scaled(&e, &a.x), scaled(&e, &a.y), a.r.clone(), a.w.clone()), rest.clone()]);
    let inv = assemble(vec![(scaled(&ei, &a.x), scaled(&ei, &a.y), a.r.clone(), a.w.clone()), rest]);
    op("W̃", sig, subst, inv, (-(n as f64) * lambda) * b.r.clone(), cst(0.0), false)
}

/// `Ṽ_σ` on two extended legs.
pub fn v_sigma_ext(n: usize, lambda: f64) -> AffinePhaseOp {
    let sig = LegSignature::extended(n, 2);
    let (a, b) = two(&sig);
    let w = a.w.clone().unwrap();
    let wp = b.w.clone().unwrap();
    let (em, ep) = (exp(-w.clone()), exp(w.clone()));
    let phase = eta_of(lambda, b.r.clone()) * beta(&a.x, &minus(&b.y, &a.y));
    let subst = assemble(vec![
        (a.x.clone(), a.y.clone(), a.r.clone() + b.r.clone(), Some(w.clone())),
        (scaled(&em, &minus(&b.x, &a.x)), scaled(&ep, &minus(&b.y, &a.y)), b.r.clone(), Some(wp.clone() - w.clone())),
    ]);
    let inv = assemble(vec![
        (a.x.clone(), a.y.clone(), a.r.clone() - b.r.clone(), Some(w.clone())),
        (plus(&scaled(&ep, &b.x), &a.x), plus(&scaled(&em, &b.y), &a.y), b.r.clone(), Some(wp + w)),
    ]);
    op("Ṽ_σ", sig, subst, inv, cst(0.0), phase, false)
}

/// `Ũ` on two extended legs, from its closed form.
pub fn u_ext(n: usize, lambda: f64) -> AffinePhaseOp {
    let sig = LegSignature::extended(n, 2);
    let (a, b) = two(&sig);
    let w = a.w.clone().unwrap();
    let wp = b.w.clone().unwrap();
    let e = exp(-lambda * b.r.clone());
    let ei = exp(lambda * b.r.clone());
    let (em, ep) = (exp(-w.clone()), exp(w.clone()));
    let (ex, ey) = (scaled(&e, &a.x), scaled(&e, &a.y));
    let phase = eta_of(lambda, b.r.clone()) * beta(&ex, &minus(&b.y, &ey));
    let subst = assemble(vec![
        (ex.clone(), ey.clone(), a.r.clone() + b.r.clone(), Some(w.clone())),
        (scaled(&em, &minus(&b.x, &ex)), scaled(&ep, &minus(&b.y, &ey)), b.r.clone(), Some(wp.clone() - w.clone())),
    ]);
    let inv = assemble(vec![
        (scaled(&ei, &a.x), scaled(&ei, &a.y), a.r.clone() - b.r.clone(), Some(w.clone())),
        (plus(&scaled(&ep, &b.x), &a.x), plus(&scaled(&em, &b.y), &a.y), b.r.clone(), Some(wp + w)),
    ]);
    op("Ũ", sig, subst, inv, (-(n as f64) * lambda) * b.r.clone(), phase, false)
}

/// Shared shape of `Δ̃L` and its opposite: leg `s` carries the `e^{λr_o}` shift
/// where `o` is the other leg.
fn delta_l_ext_shape(n: usize, lambda: f64, a: &[f64], b: &[f64], c: f64, d: f64, s: usize) -> Result<AffinePhaseOp> {
    check_len(n, a)?;
    check_len(n, b)?;
    let sig = LegSignature::extended(n, 2);
    let legs = [sig.leg_coords(0), sig.leg_coords(1)];
    let o = 1 - s;
    let (ac, bc) = (consts(a), consts(b));
    let (em, ep) = (cst((-d).exp()), cst(d.exp()));
    let e = exp(lambda * legs[o].r.clone());
    let mut phase = c * (legs[0].r.clone() + legs[1].r.clone());
    let mut subst = Vec::new();
    let mut inv = Vec::new();
    for (k, l) in legs.iter().enumerate() {
        let (sa, sb) = if k == s { (scaled(&e, &ac), scaled(&e, &bc)) } else { (ac.clone(), bc.clone()) };
        phase = phase + eta_of(lambda, l.r.clone()) * beta(&sa, &minus(&l.y, &sb));
        let w = l.w.clone().unwrap();
        subst.push((scaled(&em, &minus(&l.x, &sa)), scaled(&ep, &minus(&l.y, &sb)), l.r.clone(), Some(w.clone() - cst(d))));
        inv.push((plus(&scaled(&ep, &l.x), &sa), plus(&scaled(&em, &l.y), &sb), l.r.clone(), Some(w + cst(d))));
    }
    Ok(op("Δ̃L", sig, assemble(subst), assemble(inv), cst(0.0), phase, false))
}

/// `Δ̃(L_{a,b,c,d})` from its closed form.
pub fn delta_l_ext(n: usize, lambda: f64, a: &[f64], b: &[f64], c: f64, d: f64) -> Result<AffinePhaseOp> {
    delta_l_ext_shape(n, lambda, a, b, c, d, 0)
}

/// The closed form of `R Δ̃(L_{a,b,c,d}) R*`.
pub fn r_conjugated_block(n: usize, lambda: f64, a: &[f64], b: &[f64], c: f64, d: f64) -> Result<AffinePhaseOp> {
    Ok(delta_l_ext_shape(n, lambda, a, b, c, d, 1)?.named("RΔ̃LR*"))
}

fn phi_shape(n: usize, lambda: f64, name: &str, dil: f64, shift: f64) -> AffinePhaseOp {
    let sig = LegSignature::extended(n, 2);
    let (a, b) = two(&sig);
    let side = |l: &LegCoords, other_r: &CoordExpr, s: f64| {
        let em = exp((-s * dil * lambda) * other_r.clone());
        let ep = exp((s * dil * lambda) * other_r.clone());
        let w = l.w.clone().unwrap() - (s * shift * lambda) * other_r.clone();
        (scaled(&em, &l.x), scaled(&ep, &l.y), l.r.clone(), Some(w))
    };
    let subst = assemble(vec![side(&a, &b.r, 1.0), side(&b, &a.r, 1.0)]);
    let inv = assemble(vec![side(&a, &b.r, -1.0), side(&b, &a.r, -1.0)]);
    op(name, sig, subst, inv, cst(0.0), cst(0.0), false)
}

/// The affine factor `Φ` of the R-matrix.
pub fn phi_op(n: usize, lambda: f64) -> AffinePhaseOp {
    phi_shape(n, lambda, "Φ", 1.0, 1.0)
}

/// The kernel factor `Φ′` (sign +1) or its adjoint (sign −1), with auxiliary
/// variables `(p̃, q̃, x̃, ỹ)`.
pub fn phi_prime(n: usize, lambda: f64, sign: f64) -> QuadraticFourierOp {
    let sig = LegSignature::extended(n, 2);
    let (a, b) = two(&sig);
    let base = sig.dim();
    let aux = |k: usize| -> Vec<CoordExpr> { (0..n).map(|i| coord(base + k * n + i)).collect() };
    let (pt, qt, xt, yt) = (aux(0), aux(1), aux(2), aux(3));
    let c = (2.0 * lambda) * exp(-lambda * b.r.clone());
    let phase = c * beta(&pt, &qt) - beta(&pt, &xt) - beta(&qt, &yt) + eta_of(lambda, a.r.clone()) * beta(&xt, &a.y);
    let input = assemble(vec![
        (minus(&a.x, &scaled(&cst(sign), &xt)), a.y.clone(), a.r.clone(), a.w.clone()),
        (b.x.clone(), minus(&b.y, &scaled(&cst(sign), &yt)), b.r.clone(), b.w.clone()),
    ]);
    QuadraticFourierOp {
        name: if sign > 0.0 { "Φ′".into() } else { "Φ′*".into() },
        sig,
        aux: 4 * n,
        log_mag: cst(0.0),
        phase: sign * phase,
        input_subst: input,
    }
}

/// `Φ′` after the `(p̃, q̃)` integral is done in closed form, leaving `(x̃, ỹ)`.
pub fn phi_prime_reduced(n: usize, lambda: f64) -> Result<QuadraticFourierOp> {
    if lambda == 0.0 {
        return Err(Error::InvalidParams("reduced kernel needs λ ≠ 0".into()));
    }
    let sig = LegSignature::extended(n, 2);
    let (a, b) = two(&sig);
    let base = sig.dim();
    let xt: Vec<CoordExpr> = (0..n).map(|i| coord(base + i)).collect();
    let yt: Vec<CoordExpr> = (0..n).map(|i| coord(base + n + i)).collect();
    let inv_c = (1.0 / (2.0 * lambda)) * exp(lambda * b.r.clone());
    let log_mag = (-(n as f64)) * (cst((2.0 * lambda).abs().ln()) - lambda * b.r.clone());
    let phase = -(inv_c * beta(&xt, &yt)) + eta_of(lambda, a.r.clone()) * beta(&xt, &a.y);
    let input = assemble(vec![
        (minus(&a.x, &xt), a.y.clone(), a.r.clone(), a.w.clone()),
        (b.x.clone(), minus(&b.y, &yt), b.r.clone(), b.w.clone()),
    ]);
    Ok(QuadraticFourierOp { name: "Φ′(reduced)".into(), sig, aux: 2 * n, log_mag, phase, input_subst: input })
}

// ------------------------------------------------------- kernels from functions

/// The regular representation `L_φ` on one plain leg, from `(log_mag, phase)`
/// of `φ^∨` as a function of `(x̃, ỹ, r)`.
pub fn regular_kernel(
    n: usize,
    lambda: f64,
    name: &str,
    vee: impl Fn(&[CoordExpr], &[CoordExpr], CoordExpr) -> Result<(CoordExpr, CoordExpr)>,
) -> Result<QuadraticFourierOp> {
    let sig = LegSignature::plain(n, 1);
    let l = sig.leg_coords(0);
    let base = sig.dim();
    let xt: Vec<CoordExpr> = (0..n).map(|i| coord(base + i)).collect();
    let yt: Vec<CoordExpr> = (0..n).map(|i| coord(base + n + i)).collect();
    let (lm, ph) = vee(&xt, &yt, l.r.clone())?;
    let phase = ph + eta_of(lambda, l.r.clone()) * beta(&xt, &minus(&l.y, &yt));
    let input = assemble(vec![(minus(&l.x, &xt), minus(&l.y, &yt), l.r.clone(), None)]);
    Ok(QuadraticFourierOp { name: name.into(), sig, aux: 2 * n, log_mag: lm, phase, input_subst: input })
}

/// `L_φ` for a closed-form `φ` in the `(p, q, r)` picture.
pub fn l_phi(lambda: f64, phi: &ClosedFormFunction) -> Result<QuadraticFourierOp> {
    regular_kernel(phi.n(), lambda, "L_φ", |x, y, r| phi.log_vee_expr(x, y, r))
}

/// `L_{φ†}`.
pub fn l_phi_dagger(lambda: f64, phi: &ClosedFormFunction) -> Result<QuadraticFourierOp> {
    regular_kernel(phi.n(), lambda, "L_φ†", |x, y, r| phi.log_dagger_vee_expr(x, y, r, lambda))
}

/// `L_g` for `g` given directly in the `(x, y, r)` picture.
pub fn l_direct(lambda: f64, g: &ClosedFormFunction) -> Result<QuadraticFourierOp> {
    regular_kernel(g.n(), lambda, "L_g", |x, y, r| g.log_expr(x, y, r))
}

/// The two-leg kernel of `Δ(L_φ)(1⊗L_g)`: the regular representation of
/// `F(x,y,r,x′,y′,r′) = e^{−2nλr′}·ē[η(r′)β(εx, y′−εy)]·φ^∨(εx, εy, r+r′)·g(x′−εx, y′−εy, r′)`
/// with `ε = e^{−λr′}`.
pub fn comultiplication_kernel(lambda: f64, phi: &ClosedFormFunction, g: &ClosedFormFunction) -> Result<QuadraticFourierOp> {
    let n = phi.n();
    if g.n() != n {
        return Err(Error::Dimension { expected: n, got: g.n() });
    }
    let sig = LegSignature::plain(n, 2);
    let (u, v) = two(&sig);
    let base = sig.dim();
    let aux = |k: usize| -> Vec<CoordExpr> { (0..n).map(|i| coord(base + k * n + i)).collect() };
    let (a, b, a2, b2) = (aux(0), aux(1), aux(2), aux(3));
    let eps = exp(-lambda * v.r.clone());
    let (ea, eb) = (scaled(&eps, &a), scaled(&eps, &b));
    let (lm_phi, ph_phi) = phi.log_vee_expr(&ea, &eb, u.r.clone() + v.r.clone())?;
    let (lm_g, ph_g) = g.log_expr(&minus(&a2, &ea), &minus(&b2, &eb), v.r.clone())?;
    let log_mag = (-2.0 * n as f64 * lambda) * v.r.clone() + lm_phi + lm_g;
    let phase = eta_of(lambda, v.r.clone()) * beta(&ea, &minus(&b2, &eb))
        + ph_phi
        + ph_g
        + eta_of(lambda, u.r.clone()) * beta(&a, &minus(&u.y, &b))
        + eta_of(lambda, v.r.clone()) * beta(&a2, &minus(&v.y, &b2));
    let input = assemble(vec![
        (minus(&u.x, &a), minus(&u.y, &b), u.r.clone(), None),
        (minus(&v.x, &a2), minus(&v.y, &b2), v.r.clone(), None),
    ]);
    Ok(QuadraticFourierOp { name: "Δ(L_φ)(1⊗L_g)".into(), sig, aux: 4 * n, log_mag, phase, input_subst: input })
}

// ------------------------------------------------ multipliers on (p,q,r,w)²

/// Left multiplication by `Φ` on functions of `(p,q,r,w,p′,q′,r′,w′)`.
pub fn phi_left_mult(n: usize, lambda: f64) -> AffinePhaseOp {
    phi_shape(n, lambda, "Φ·", -1.0, 1.0)
}

/// Right multiplication by `Φ`.
pub fn phi_right_mult(n: usize, lambda: f64) -> AffinePhaseOp {
    phi_shape(n, lambda, "·Φ", 0.0, 1.0)
}

/// Left multiplication by `Φ′`.
pub fn phi_prime_left_mult(n: usize, lambda: f64) -> AffinePhaseOp {
    let sig = LegSignature::extended(n, 2);
    let (a, b) = two(&sig);
    let e = exp(-lambda * b.r.clone());
    let k = (2.0 * lambda) * eta_of(lambda, a.r.clone()) * e.clone();
    let phase = (2.0 * lambda) * e * beta(&a.x, &b.y);
    let rest = (b.x.clone(), b.y.clone(), b.r.clone(), b.w.clone());
    let subst = assemble(vec![(a.x.clone(), plus(&a.y, &scaled(&k, &b.y)), a.r.clone(), a.w.clone()), rest.clone()]);
    let inv = assemble(vec![(a.x.clone(), minus(&a.y, &scaled(&k, &b.y)), a.r.clone(), a.w.clone()), rest]);
    op("Φ′·", sig, subst, inv, cst(0.0), phase, false)
}

/// Right multiplication by `Φ′`.
pub fn phi_prime_right_mult(n: usize, lambda: f64) -> AffinePhaseOp {
    let sig = LegSignature::extended(n, 2);
    let (a, b) = two(&sig);
    let (w, wp) = (a.w.clone().unwrap(), b.w.clone().unwrap());
    let e = exp(-lambda * b.r.clone() + w - wp);
    let k = (2.0 * lambda) * eta_of(lambda, b.r.clone()) * e.clone();
    let phase = (2.0 * lambda) * e * beta(&a.x, &b.y);
    let first = (a.x.clone(), a.y.clone(), a.r.clone(), a.w.clone());
    let subst = assemble(vec![first.clone(), (plus(&b.x, &scaled(&k, &a.x)), b.y.clone(), b.r.clone(), b.w.clone())]);
    let inv = assemble(vec![first, (minus(&b.x, &scaled(&k, &a.x)), b.y.clone(), b.r.clone(), b.w.clone())]);
    op("·Φ′", sig, subst, inv, cst(0.0), phase, false)
}

/// The conjugation `F ↦ R F R*` on functions of `(p,q,r,w,p′,q′,r′,w′)`,
/// from its closed form.
pub fn psi_op(n: usize, lambda: f64) -> AffinePhaseOp {
    let sig = LegSignature::extended(n, 2);
    let (a, b) = two(&sig);
    let (w, wp) = (a.w.clone().unwrap(), b.w.clone().unwrap());
    let (r, rp) = (a.r.clone(), b.r.clone());
    let e_r = exp(lambda * r.clone());
    let e_mr = exp(-lambda * r.clone());
    let e_rp = exp(lambda * rp.clone());
    let e_mrp = exp(-lambda * rp.clone());
    let e_dw = exp(w.clone() - wp.clone());
    let pq = beta(&a.x, &b.y);
    let phase = (2.0 * lambda) * e_mr.clone() * pq.clone() - (2.0 * lambda) * e_dw.clone() * e_mr.clone() * pq;
    let kq = (2.0 * lambda) * exp(-lambda * (r.clone() + rp.clone())) * eta_of(lambda, r.clone());
    let kp = (2.0 * lambda) * e_dw.clone() * eta_of(lambda, rp.clone());
    let subst = assemble(vec![
        (scaled(&e_rp, &a.x), plus(&scaled(&e_mrp, &a.y), &scaled(&kq, &b.y)), r.clone(), Some(w.clone())),
        (minus(&scaled(&e_r, &b.x), &scaled(&kp, &a.x)), scaled(&e_mr, &b.y), rp.clone(), Some(wp.clone())),
    ]);
    // Inverse: p = e^{−λr′}P, q = e^{λr′}Q − 2λη(r)Q′, p′ = e^{−λr}(P′ + 2λe^{w−w′}η(r′)e^{−λr′}P), q′ = e^{λr}Q′.
    let ki = (2.0 * lambda) * eta_of(lambda, r.clone());
    let kpi = (2.0 * lambda) * e_dw * eta_of(lambda, rp.clone()) * e_mrp.clone();
    let inv = assemble(vec![
        (scaled(&e_mrp, &a.x), minus(&scaled(&e_rp, &a.y), &scaled(&ki, &b.y)), r, Some(w)),
        (scaled(&e_mr, &plus(&b.x, &scaled(&kpi, &a.x))), scaled(&e_r, &b.y), rp, Some(wp)),
    ]);
    op("Ψ", sig, subst, inv, cst(0.0), phase, false)
}

// ------------------------------------------------------------ operator chains

/// Either kind of operator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum AnyOp {
    Affine(AffinePhaseOp),
    Kernel(QuadraticFourierOp),
}

impl AnyOp {
    pub fn sig(&self) -> &LegSignature {
        match self {
            AnyOp::Affine(o) => &o.sig,
            AnyOp::Kernel(o) => &o.sig,
        }
    }

    pub fn apply(&self, v: &GaussianSliceVector) -> Result<GaussianSliceVector> {
        match self {
            AnyOp::Affine(o) => v.apply_affine(o),
            AnyOp::Kernel(o) => v.apply_kernel(o),
        }
    }

    pub fn embed_legs(&self, which: &[usize], target: &LegSignature) -> Result<Self> {
        Ok(match self {
            AnyOp::Affine(o) => AnyOp::Affine(AffinePhaseOp::embed_legs(o, which, target)?),
            AnyOp::Kernel(o) => AnyOp::Kernel(QuadraticFourierOp::embed_legs(o, which, target)?),
        })
    }
}

/// A product `A₁A₂⋯A_k`; applying it runs `A_k` first.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OpChain {
    pub factors: Vec<AnyOp>,
}

impl OpChain {
    pub fn new(factors: Vec<AnyOp>) -> Self {
        Self { factors }
    }

    pub fn affine(op: AffinePhaseOp) -> Self {
        Self::new(vec![AnyOp::Affine(op)])
    }

    pub fn then_after(mut self, other: &OpChain) -> Self {
        self.factors.extend(other.factors.iter().cloned());
        self
    }

    pub fn apply(&self, v: &GaussianSliceVector) -> Result<GaussianSliceVector> {
        self.factors.iter().rev().try_fold(v.clone(), |acc, f| f.apply(&acc))
    }

    pub fn embed_legs(&self, which: &[usize], target: &LegSignature) -> Result<Self> {
        Ok(Self::new(self.factors.iter().map(|f| f.embed_legs(which, target)).collect::<Result<_>>()?))
    }
}

/// `R = ΦΦ′`.
pub fn r_matrix(n: usize, lambda: f64) -> OpChain {
    OpChain::new(vec![AnyOp::Affine(phi_op(n, lambda)), AnyOp::Kernel(phi_prime(n, lambda, 1.0))])
}

/// `R* = Φ′*Φ⁻¹`.
pub fn r_matrix_adjoint(n: usize, lambda: f64) -> OpChain {
    OpChain::new(vec![
        AnyOp::Kernel(phi_prime(n, lambda, -1.0)),
        AnyOp::Affine(phi_op(n, lambda).inverse().expect("Φ carries its inverse")),
    ])
}

/// `R` with the reduced two-variable kernel.
pub fn r_matrix_reduced(n: usize, lambda: f64) -> Result<OpChain> {
    Ok(OpChain::new(vec![AnyOp::Affine(phi_op(n, lambda)), AnyOp::Kernel(phi_prime_reduced(n, lambda)?)]))
}
