//! Twisted convolution, the deformed product and the structure maps that live
//! on a single grid: involution, Haar functional, counit and antipode.

use rayon::prelude::*;
use rustfft::FftPlanner;

use super::closed_form::ClosedFormFunction;
use super::fourier::{vee, wedge};
use super::grid::{Grid, Picture, SampledFunction};
use crate::groups::eta;
use crate::{e, ebar, Error, ModelParams, Result, C64};

/// Off-grid evaluations whose boundary residual exceeds this are flagged.
pub const INTERPOLATION_BUDGET: f64 = 1e-8;

fn require_n1(params: &ModelParams) -> Result<()> {
    if params.n != 1 {
        return Err(Error::Grid(format!("grid algebra is realised for n = 1, got n = {}", params.n)));
    }
    Ok(())
}

/// `σ^r(h, h′) = ē[ℏη_λ(r)β(x, y′)]` on `H/Z`.
pub fn sigma(params: &ModelParams, r: f64, h: (&[f64], &[f64]), h2: (&[f64], &[f64])) -> Result<C64> {
    Ok(ebar(params.heta(r) * crate::groups::beta(h.0, h2.1)?))
}

/// `|σ(hh′,h″)σ(h,h′) − σ(h,h′h″)σ(h′,h″)|`.
pub fn sigma_cocycle_defect(params: &ModelParams, r: f64, h: [&[f64]; 2], h1: [&[f64]; 2], h2: [&[f64]; 2]) -> Result<f64> {
    let add = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(u, v)| u + v).collect::<Vec<f64>>();
    let (hx, hy) = (add(h[0], h1[0]), add(h[1], h1[1]));
    let (kx, ky) = (add(h1[0], h2[0]), add(h1[1], h2[1]));
    let lhs = sigma(params, r, (&hx, &hy), (h2[0], h2[1]))? * sigma(params, r, (h[0], h[1]), (h1[0], h1[1]))?;
    let rhs = sigma(params, r, (h[0], h[1]), (&kx, &ky))? * sigma(params, r, (h1[0], h1[1]), (h2[0], h2[1]))?;
    Ok((lhs - rhs).norm())
}

fn check_conv_inputs(f: &SampledFunction, g: &SampledFunction, params: &ModelParams) -> Result<()> {
    require_n1(params)?;
    f.require_compatible(g)?;
    f.require_picture(Picture::Xyr)
}

/// Direct summation: `Δx² Σ_{a,b} f_ab g_{i−a, j−b} ē[ℏη x_a (y_j − y_b)]`, O(N⁴) per slice.
pub fn twisted_conv_direct(f: &SampledFunction, g: &SampledFunction, params: &ModelParams) -> Result<SampledFunction> {
    check_conv_inputs(f, g, params)?;
    let axis = f.grid.fast_axis(Picture::Xyr);
    let (n, half, dx) = (axis.points, axis.points / 2, axis.spacing());
    let x = axis.coords();
    let mut out = SampledFunction::zeros(f.grid, Picture::Xyr);
    out.data.par_chunks_mut(n * n).enumerate().for_each(|(k, o)| {
        if f.slice_is_zero(k) || g.slice_is_zero(k) {
            return;
        }
        let (fs, gs) = (f.slice(k), g.slice(k));
        let heta = params.heta(f.grid.r.coord(k));
        let mut fa = vec![C64::new(0.0, 0.0); n];
        for a in 0..n {
            let ea: Vec<C64> = x.iter().map(|&y| ebar(heta * x[a] * y)).collect();
            for b in 0..n {
                fa[b] = fs[a * n + b] * ea[b].conj();
            }
            for i in 0..n {
                let Some(m) = (i + half).checked_sub(a).filter(|&m| m < n) else { continue };
                let grow = &gs[m * n..(m + 1) * n];
                for j in 0..n {
                    let mut acc = C64::new(0.0, 0.0);
                    for b in 0..n {
                        if let Some(u) = (j + half).checked_sub(b).filter(|&u| u < n) {
                            acc += fa[b] * grow[u];
                        }
                    }
                    o[i * n + j] += ea[j] * acc * dx * dx;
                }
            }
        }
    });
    Ok(out)
}

/// Same sum with each `b`-convolution done by zero-padded FFTs; the phase is
/// attached to `g` as `ē[ℏη x_a y_u]` so the `a`-sum happens in frequency space.
pub fn twisted_conv_fft(f: &SampledFunction, g: &SampledFunction, params: &ModelParams) -> Result<SampledFunction> {
    check_conv_inputs(f, g, params)?;
    let axis = f.grid.fast_axis(Picture::Xyr);
    let (n, half, dx) = (axis.points, axis.points / 2, axis.spacing());
    let x = axis.coords();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(2 * n);
    let inv = planner.plan_fft_inverse(2 * n);
    let norm = dx * dx / (2 * n) as f64;
    let mut out = SampledFunction::zeros(f.grid, Picture::Xyr);
    out.data.par_chunks_mut(n * n).enumerate().for_each(|(k, o)| {
        if f.slice_is_zero(k) || g.slice_is_zero(k) {
            return;
        }
        let (fs, gs) = (f.slice(k), g.slice(k));
        let heta = params.heta(f.grid.r.coord(k));
        let mut scratch = vec![C64::new(0.0, 0.0); fwd.get_inplace_scratch_len().max(inv.get_inplace_scratch_len())];
        let fhat: Vec<Vec<C64>> = (0..n)
            .map(|a| {
                let mut buf = vec![C64::new(0.0, 0.0); 2 * n];
                buf[..n].copy_from_slice(&fs[a * n..(a + 1) * n]);
                fwd.process_with_scratch(&mut buf, &mut scratch);
                buf
            })
            .collect();
        let phase: Vec<C64> = (0..n * n).map(|t| ebar(heta * x[t / n] * x[t % n])).collect();
        let mut acc = vec![C64::new(0.0, 0.0); 2 * n];
        let mut buf = vec![C64::new(0.0, 0.0); 2 * n];
        for i in 0..n {
            acc.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
            for a in 0..n {
                let Some(m) = (i + half).checked_sub(a).filter(|&m| m < n) else { continue };
                for u in 0..n {
                    buf[u] = gs[m * n + u] * phase[a * n + u];
                }
                buf[n..].iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
                fwd.process_with_scratch(&mut buf, &mut scratch);
                for (s, (b, fh)) in acc.iter_mut().zip(buf.iter().zip(&fhat[a])) {
                    *s += b * fh;
                }
            }
            inv.process_with_scratch(&mut acc, &mut scratch);
            for j in 0..n {
                o[i * n + j] = acc[j + half] * norm;
            }
        }
    });
    Ok(out)
}

/// The twisted convolution used by every pipeline (FFT engine).
pub fn twisted_conv(f: &SampledFunction, g: &SampledFunction, params: &ModelParams) -> Result<SampledFunction> {
    twisted_conv_fft(f, g, params)
}

/// `φ × ψ = (φ^∨ ∗_σ ψ^∨)^∧`.
pub fn deformed_mul(phi: &SampledFunction, psi: &SampledFunction, params: &ModelParams) -> Result<SampledFunction> {
    phi.require_compatible(psi)?;
    wedge(&twisted_conv(&vee(phi)?, &vee(psi)?, params)?)
}

/// Same product through the direct O(N⁴) engine.
pub fn deformed_mul_direct(phi: &SampledFunction, psi: &SampledFunction, params: &ModelParams) -> Result<SampledFunction> {
    phi.require_compatible(psi)?;
    wedge(&twisted_conv_direct(&vee(phi)?, &vee(psi)?, params)?)
}

/// `∫ ē[(p−p′)x̃] φ(p′,q,r) ψ(p, q+ℏη(r)x̃, r) dp′ dx̃` by a 2-D trapezoid rule.
pub fn deformed_mul_oracle(
    phi: &ClosedFormFunction,
    psi: &ClosedFormFunction,
    params: &ModelParams,
    points: &[[f64; 3]],
) -> Result<Vec<C64>> {
    require_n1(params)?;
    if phi.n() != 1 || psi.n() != 1 {
        return Err(Error::Grid("product oracle is written for n = 1".into()));
    }
    let step = 1.0 / 48.0;
    let gp = phi.p[0];
    let pp = trapezoid_nodes(gp.center - 7.0 * gp.width, gp.center + 7.0 * gp.width, step);
    let xt = trapezoid_nodes(-gp.wave - 7.0 / gp.width, -gp.wave + 7.0 / gp.width, step);
    Ok(points
        .par_iter()
        .map(|&[p, q, r]| {
            let heta = params.heta(r);
            let phis: Vec<C64> = pp.iter().map(|&(t, w)| w * phi.eval(&[t], &[q], r, 0.0)).collect();
            let mut acc = C64::new(0.0, 0.0);
            for &(x, wx) in &xt {
                let inner: C64 = pp.iter().zip(&phis).map(|(&(t, _), &v)| ebar((p - t) * x) * v).sum();
                acc += wx * inner * psi.eval(&[p], &[q + heta * x], r, 0.0);
            }
            acc * step * step
        })
        .collect())
}

fn trapezoid_nodes(lo: f64, hi: f64, step: f64) -> Vec<(f64, f64)> {
    let m = ((hi - lo) / step).ceil() as usize;
    (0..=m).map(|k| (lo + k as f64 * step, if k == 0 || k == m { 0.5 } else { 1.0 })).collect()
}

/// `φ* = (f*)^∧` with `f*(x,y,r) = conj f(−x,−y,r)·ē[ℏη(r)xy]`, `f = φ^∨`.
pub fn involution(phi: &SampledFunction, params: &ModelParams) -> Result<SampledFunction> {
    require_n1(params)?;
    let f = vee(phi)?;
    let axis = f.grid.fast_axis(Picture::Xyr);
    let n = axis.points;
    let x = axis.coords();
    let mut star = SampledFunction::zeros(f.grid, Picture::Xyr);
    star.data.par_chunks_mut(n * n).enumerate().for_each(|(k, o)| {
        let heta = params.heta(f.grid.r.coord(k));
        let s = f.slice(k);
        for i in 1..n {
            for j in 1..n {
                o[i * n + j] = s[(n - i) * n + (n - j)].conj() * ebar(heta * x[i] * x[j]);
            }
        }
    });
    wedge(&star)
}

/// `h(φ) = ∫ φ dp dq dr` as a Riemann sum.
pub fn haar(phi: &SampledFunction) -> Result<C64> {
    phi.require_picture(Picture::Pqr)?;
    Ok(phi.sum() * phi.grid.cell(Picture::Pqr))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CounitValue {
    /// `φ(0,0,0)`.
    pub origin: C64,
    /// `∫ φ^∨(x,y,0) dx dy`.
    pub dual: C64,
}

impl CounitValue {
    pub fn defect(&self) -> f64 {
        (self.origin - self.dual).norm()
    }
}

pub fn counit(phi: &SampledFunction) -> Result<CounitValue> {
    phi.require_picture(Picture::Pqr)?;
    let (o, or) = (phi.grid.fast.origin(), phi.grid.r.origin());
    if phi.grid.fast.coord(o) != 0.0 || phi.grid.r.coord(or) != 0.0 {
        return Err(Error::Config("origin is not a grid point".into()));
    }
    let f = vee(phi)?;
    let dx = f.grid.fast_axis(Picture::Xyr).spacing();
    let dual = f.slice(or).iter().sum::<C64>() * dx * dx;
    Ok(CounitValue { origin: phi.at(o, o, or), dual })
}

/// `φ†(p,q,r) = conj φ(−e^{−λr}p, −e^{−λr}q, −r)` of sampled data. Values at
/// the scaled points come from the trigonometric interpolant
/// `Σ_{x,y} ē[px + qy] φ^∨(x,y,r) Δx²`; points outside the box are set to 0.
/// Returns the result and the boundary residual of the data it interpolated.
pub fn dagger(phi: &SampledFunction, lambda: f64) -> Result<(SampledFunction, f64)> {
    phi.require_picture(Picture::Pqr)?;
    let f = vee(phi)?;
    let grid = phi.grid;
    let (n, ns) = (phi.n_fast(), phi.n_slow());
    let p = grid.fast.coords();
    let xa = grid.fast_axis(Picture::Xyr);
    let (x, dx) = (xa.coords(), xa.spacing());
    let lim = grid.fast.half_width;
    let mut out = SampledFunction::zeros(grid, Picture::Pqr);
    out.data.par_chunks_mut(n * n).enumerate().for_each(|(k, o)| {
        if k == 0 || f.slice_is_zero(ns - k) {
            return;
        }
        let src = f.slice(ns - k);
        let s = -(-lambda * grid.r.coord(k)).exp();
        let em: Vec<C64> = (0..n * n)
            .map(|t| {
                let sp = s * p[t / n];
                if sp.abs() <= lim {
                    ebar(sp * x[t % n]) * dx
                } else {
                    C64::new(0.0, 0.0)
                }
            })
            .collect();
        let mut tmp = vec![C64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for b in 0..n {
                tmp[i * n + b] = (0..n).map(|a| em[i * n + a] * src[a * n + b]).sum();
            }
        }
        for i in 0..n {
            for j in 0..n {
                let v: C64 = (0..n).map(|b| tmp[i * n + b] * em[j * n + b]).sum();
                o[i * n + j] = v.conj();
            }
        }
    });
    let residual = phi.boundary_ratio() + f.boundary_ratio();
    Ok((out, residual))
}

/// `φ†` of a closed form, sampled exactly.
pub fn dagger_closed(grid: Grid, phi: &ClosedFormFunction, lambda: f64) -> SampledFunction {
    SampledFunction::from_fn(grid, Picture::Pqr, |p, q, r| phi.dagger_eval(&[p], &[q], r, lambda))
}

#[derive(Clone, Debug)]
pub struct AntipodeOutput {
    /// `(φ*)†`.
    pub value: SampledFunction,
    /// `(φ†)*`.
    pub other_order: SampledFunction,
    /// Relative L² distance between the two orders.
    pub order_defect: f64,
    pub interpolation_residual: f64,
    pub degraded: bool,
}

/// `κ(φ) = (φ*)† = (φ†)*`, both orders from sampled data.
pub fn antipode(phi: &SampledFunction, params: &ModelParams) -> Result<AntipodeOutput> {
    let (a, ra) = dagger(&involution(phi, params)?, params.lambda)?;
    let (d, rb) = dagger(phi, params.lambda)?;
    let b = involution(&d, params)?;
    let order_defect = a.rel_l2(&b)?;
    let interpolation_residual = ra.max(rb);
    Ok(AntipodeOutput {
        value: a,
        other_order: b,
        order_defect,
        interpolation_residual,
        degraded: interpolation_residual > INTERPOLATION_BUDGET,
    })
}

/// `(φ†)*` with the dagger evaluated analytically.
pub fn antipode_closed(grid: Grid, phi: &ClosedFormFunction, params: &ModelParams) -> Result<SampledFunction> {
    involution(&dagger_closed(grid, phi, params.lambda), params)
}

/// Upper-bound estimate of `max_r ‖L_φ‖` on the grid by power iteration on
/// `ξ ↦ L_φ* L_φ ξ`, with `L_φ ξ = φ^∨ ∗_σ ξ`.
pub fn operator_norm_estimate(phi: &SampledFunction, params: &ModelParams, iterations: usize, seed: u64) -> Result<f64> {
    use rand::Rng;
    let f = vee(phi)?;
    let fstar = vee(&involution(phi, params)?)?;
    let mut rng = crate::rng::stream(seed, "operator-norm");
    let mut xi = SampledFunction::from_fn(phi.grid, Picture::Xyr, |_, _, _| C64::new(0.0, 0.0));
    for v in xi.data.iter_mut() {
        *v = C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
    }
    let n = phi.n_fast();
    let mut est = vec![0.0; phi.n_slow()];
    for _ in 0..iterations {
        let y = twisted_conv(&fstar, &twisted_conv(&f, &xi, params)?, params)?;
        for (k, e) in est.iter_mut().enumerate() {
            let num: f64 = y.slice(k).iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            let den: f64 = xi.slice(k).iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            *e = if den > 0.0 { num / den } else { 0.0 };
        }
        xi = y;
        for k in 0..phi.n_slow() {
            let s: f64 = xi.slice(k).iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            if s > 0.0 {
                for v in &mut xi.data[k * n * n..(k + 1) * n * n] {
                    *v /= s;
                }
            }
        }
    }
    Ok(est.iter().fold(0.0f64, |m, v| m.max(*v)).sqrt())
}

/// `(L_{A,B,C} × ψ)(p,q,r) = ē(pA + qB + rC) ψ(p, q + ℏη(r)A, r)`.
pub fn plane_wave_product<F: Fn(f64, f64, f64) -> C64>(
    params: &ModelParams,
    abc: [f64; 3],
    psi: F,
    p: f64,
    q: f64,
    r: f64,
) -> C64 {
    ebar(p * abc[0] + q * abc[1] + r * abc[2]) * psi(p, q + params.hbar * eta(params.lambda, r) * abc[0], r)
}

/// `κ(L_{a,b,c})(p,q,r) = e[e^{−λr}(pa + qb) + rc]·ē[η(r)e^{−2λr}ab]` (ℏ = 1).
pub fn antipode_of_plane_wave(lambda: f64, abc: [f64; 3], p: f64, q: f64, r: f64) -> C64 {
    let s = (-lambda * r).exp();
    e(s * (p * abc[0] + q * abc[1]) + r * abc[2]) * ebar(eta(lambda, r) * s * s * abc[0] * abc[1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Bump;

    fn grid() -> Grid {
        Grid::self_dual(64, 0.55, 64).unwrap()
    }

    fn pair() -> (ClosedFormFunction, ClosedFormFunction) {
        (
            ClosedFormFunction::gaussian1([0.1, -0.05, 1.2, 1.25, 0.1, -0.05], Bump::new(0.0, 0.5)),
            ClosedFormFunction::gaussian1([-0.05, 0.1, 1.15, 1.2, -0.05, 0.1], Bump::new(0.0, 0.5)),
        )
    }

    fn params(hbar: f64) -> ModelParams {
        ModelParams::new(1, 1.0, hbar).unwrap()
    }

    #[test]
    fn engines_agree() {
        let (a, b) = pair();
        let g = grid();
        let f = SampledFunction::sample_vee(g, &a).unwrap();
        let h = SampledFunction::sample_vee(g, &b).unwrap();
        let pr = params(1.0);
        let d = twisted_conv_direct(&f, &h, &pr).unwrap();
        let t = twisted_conv_fft(&f, &h, &pr).unwrap();
        let err = d.sub(&t).unwrap().max_abs() / d.max_abs();
        assert!(err < 1e-10, "{err}");
    }

    #[test]
    fn hbar_zero_is_pointwise() {
        let (a, b) = pair();
        let g = grid();
        let (f, h) = (SampledFunction::sample(g, &a).unwrap(), SampledFunction::sample(g, &b).unwrap());
        let prod = deformed_mul(&f, &h, &params(0.0)).unwrap();
        let pointwise = f.zip_with(&h, |u, v| u * v).unwrap();
        assert!(prod.rel_l2(&pointwise).unwrap() < 1e-10);
    }

    #[test]
    fn pipeline_matches_oracle() {
        use rand::Rng;
        let (a, b) = pair();
        let g = grid();
        let pr = params(1.0);
        let prod = deformed_mul(&SampledFunction::sample(g, &a).unwrap(), &SampledFunction::sample(g, &b).unwrap(), &pr).unwrap();
        let mut rng = crate::rng::stream(3, "oracle-points");
        let idx: Vec<[usize; 3]> = (0..48).map(|_| [rng.gen_range(8..56), rng.gen_range(8..56), rng.gen_range(6..58)]).collect();
        let pts: Vec<[f64; 3]> = idx.iter().map(|&[i, j, k]| [g.fast.coord(i), g.fast.coord(j), g.r.coord(k)]).collect();
        let want = deformed_mul_oracle(&a, &b, &pr, &pts).unwrap();
        let (mut num, mut den) = (0.0, 0.0);
        for (w, &[i, j, k]) in want.iter().zip(&idx) {
            num += (prod.at(i, j, k) - w).norm_sqr();
            den += w.norm_sqr();
        }
        assert!((num / den).sqrt() < 1e-7, "{}", (num / den).sqrt());
    }

    #[test]
    fn involution_properties() {
        let (a, b) = pair();
        let g = grid();
        let pr = params(1.0);
        let (f, h) = (SampledFunction::sample(g, &a).unwrap(), SampledFunction::sample(g, &b).unwrap());
        let twice = involution(&involution(&f, &pr).unwrap(), &pr).unwrap();
        assert!(twice.rel_l2(&f).unwrap() < 1e-10);
        let lhs = involution(&deformed_mul(&f, &h, &pr).unwrap(), &pr).unwrap();
        let rhs = deformed_mul(&involution(&h, &pr).unwrap(), &involution(&f, &pr).unwrap(), &pr).unwrap();
        assert!(lhs.rel_l2(&rhs).unwrap() < 1e-7);
        let classical = involution(&f, &params(0.0)).unwrap();
        assert!(classical.rel_l2(&f.map(|v| v.conj())).unwrap() < 1e-10);
    }

    #[test]
    fn haar_and_counit() {
        let (a, b) = pair();
        let g = grid();
        let pr = params(1.0);
        let (f, h) = (SampledFunction::sample(g, &a).unwrap(), SampledFunction::sample(g, &b).unwrap());
        let exact = a.integral().unwrap();
        assert!((haar(&f).unwrap() - exact).norm() / exact.norm() < 1e-8);
        let tr = haar(&deformed_mul(&involution(&f, &pr).unwrap(), &f, &pr).unwrap()).unwrap();
        let l2 = f.norm_l2().powi(2);
        assert!((tr - l2).norm() / l2 < 1e-6);
        let fg = haar(&deformed_mul(&f, &h, &pr).unwrap()).unwrap();
        let gf = haar(&deformed_mul(&h, &f, &pr).unwrap()).unwrap();
        assert!((fg - gf).norm() / fg.norm() < 1e-6);
        let c = counit(&f).unwrap();
        assert!(c.defect() < 1e-8);
        assert!((c.origin - a.eval(&[0.0], &[0.0], 0.0, 0.0)).norm() < 1e-14);
        let m = counit(&deformed_mul(&f, &h, &pr).unwrap()).unwrap();
        let want = c.origin * counit(&h).unwrap().origin;
        assert!((m.origin - want).norm() / want.norm() < 1e-6);
    }

    #[test]
    fn antipode_properties() {
        let (a, b) = pair();
        let g = grid();
        let pr = params(1.0);
        let (f, h) = (SampledFunction::sample(g, &a).unwrap(), SampledFunction::sample(g, &b).unwrap());
        let k = antipode(&f, &pr).unwrap();
        assert!(k.order_defect < 1e-6, "{}", k.order_defect);
        assert!(!k.degraded, "{}", k.interpolation_residual);
        let closed = antipode_closed(g, &a, &pr).unwrap();
        assert!(k.value.rel_l2(&closed).unwrap() < 1e-6);
        let lhs = antipode(&deformed_mul(&f, &h, &pr).unwrap(), &pr).unwrap().value;
        let rhs = deformed_mul(&antipode(&h, &pr).unwrap().value, &k.value, &pr).unwrap();
        assert!(lhs.rel_l2(&rhs).unwrap() < 1e-5, "{}", lhs.rel_l2(&rhs).unwrap());
        let classical = antipode(&f, &params(0.0)).unwrap().value;
        let inverse = SampledFunction::from_fn(g, Picture::Pqr, |p, q, r| {
            let s = -(-r).exp();
            a.eval(&[s * p], &[s * q], -r, 0.0)
        });
        assert!(classical.rel_l2(&inverse).unwrap() < 1e-8);
    }

    #[test]
    fn cocycle_identity() {
        let pr = params(1.0);
        let d = sigma_cocycle_defect(&pr, 0.3, [&[0.2], &[-0.7]], [&[1.1], &[0.4]], [&[-0.3], &[0.9]]).unwrap();
        assert!(d < 1e-14);
    }
}
