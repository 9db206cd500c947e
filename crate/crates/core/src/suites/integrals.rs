//! Quadratures behind the antipode-axiom and left-invariance suites.
//!
//! All inputs are `n = 1` closed forms. Sums run in a fixed order over
//! rows computed in parallel, so results do not depend on the thread count.

use rayon::prelude::*;

use crate::algebra::product::{antipode_of_plane_wave, plane_wave_product};
use crate::algebra::{deformed_mul, haar, ClosedFormFunction, Grid, Picture, SampledFunction};
use crate::groups::eta;
use crate::{e, ebar, Error, ModelParams, Result, C64};

/// Trapezoid nodes `(t, weight)` on `[lo, hi]` with `count` intervals.
fn nodes(lo: f64, hi: f64, count: usize) -> Vec<(f64, f64)> {
    let h = (hi - lo) / count as f64;
    (0..=count).map(|k| (lo + k as f64 * h, if k == 0 || k == count { 0.5 * h } else { h })).collect()
}

fn symmetric_nodes(half: f64, step: f64) -> Vec<(f64, f64)> {
    nodes(-half, half, (2.0 * half / step).round() as usize)
}

fn require_plain(f: &ClosedFormFunction) -> Result<()> {
    if f.n() != 1 || f.is_extended() || !f.poly.is_empty() {
        return Err(Error::Unsupported("quadrature suites take n = 1 Gaussian closed forms".into()));
    }
    Ok(())
}

fn ordered_sum(rows: Vec<Result<C64>>) -> Result<C64> {
    let mut acc = C64::new(0.0, 0.0);
    for r in rows {
        acc += r?;
    }
    Ok(acc)
}

/// Trapezoid resolution for the antipode-axiom integral over `(a, b, c)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AxiomResolution {
    pub half_width: f64,
    pub step: f64,
    pub c_half_width: f64,
    pub c_step: f64,
}

impl Default for AxiomResolution {
    fn default() -> Self {
        Self { half_width: 8.0, step: 0.125, c_half_width: 64.0, c_step: 1.0 }
    }
}

/// `(ℱ⁻¹φ)(a, b, c) = ∫ e(pa + qb + rc) φ dp dq dr`, with the `(a, b)` part in
/// closed form and the `r` transform of the bump tabulated on the `c` nodes.
pub struct InverseFourier<'a> {
    phi: &'a ClosedFormFunction,
    c: Vec<(f64, f64)>,
    bump_hat: Vec<C64>,
}

impl<'a> InverseFourier<'a> {
    pub fn new(phi: &'a ClosedFormFunction, c_half_width: f64, c_step: f64) -> Result<Self> {
        require_plain(phi)?;
        let (lo, hi) = phi.r_bump.support();
        let rs = nodes(lo, hi, 4000);
        let c = symmetric_nodes(c_half_width, c_step);
        let bump_hat = c
            .iter()
            .map(|&(cc, _)| rs.iter().map(|&(r, w)| w * phi.r_bump.eval(r) * e(r * cc)).sum())
            .collect();
        Ok(Self { phi, c, bump_hat })
    }

    pub fn c_nodes(&self) -> &[(f64, f64)] {
        &self.c
    }

    /// Value at `(a, b, c_k)`.
    pub fn eval(&self, a: f64, b: f64, k: usize) -> C64 {
        let r0 = self.phi.r_bump.center;
        let fast = self.phi.vee(&[a], &[b], r0, 0.0).expect("checked plain") / self.phi.r_bump.eval(r0);
        fast * self.bump_hat[k]
    }
}

/// Which side of the antipode axiom.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AxiomOrder {
    /// `m((id⊗κ)Δφ)`.
    IdKappa,
    /// `m((κ⊗id)Δφ)`.
    KappaId,
}

/// `m((id⊗κ)Δφ)(p,q,r)` or `m((κ⊗id)Δφ)(p,q,r)` at `ℏ = 1`.
///
/// `Δφ` is written as `∫ ψ¹_{abc} ⊗ ψ²_{abc} da db dc` with one plane-wave
/// leg, the leg product is taken with the plane-wave product rule, and the
/// result is integrated over `(a, b, c)`.
pub fn antipode_axiom(
    phi: &ClosedFormFunction,
    lambda: f64,
    order: AxiomOrder,
    point: [f64; 3],
    res: AxiomResolution,
) -> Result<C64> {
    let inv = InverseFourier::new(phi, res.c_half_width, res.c_step)?;
    let params = ModelParams::new(1, lambda, 1.0)?;
    let ab = symmetric_nodes(res.half_width, res.step);
    let [p, q, r] = point;
    let rows: Vec<Result<C64>> = ab
        .par_iter()
        .map(|&(a, wa)| {
            let mut row = C64::new(0.0, 0.0);
            for &(b, wb) in &ab {
                for (k, &(c, wc)) in inv.c_nodes().iter().enumerate() {
                    let v = match order {
                        AxiomOrder::IdKappa => {
                            // κ already applied to the second leg; the first is L_{a,b,c}.
                            let psi2 = |p2: f64, q2: f64, r2: f64| {
                                let s = (lambda * r2).exp();
                                s * s * e(p2 * a + q2 * b + r2 * c) * ebar(eta(lambda, r2) * a * b) * inv.eval(s * a, s * b, k)
                            };
                            plane_wave_product(&params, [a, b, c], psi2, p, q, r)
                        }
                        AxiomOrder::KappaId => {
                            let psi2 = |p2: f64, q2: f64, r2: f64| {
                                let s = (-lambda * r2).exp();
                                s * s * inv.eval(s * a, s * b, k) * ebar(s * (p2 * a + q2 * b) + r2 * c)
                            };
                            let s = (-lambda * r).exp();
                            let g = antipode_of_plane_wave(lambda, [a, b, c], 0.0, 0.0, r);
                            g * plane_wave_product(&params, [-s * a, -s * b, 0.0], psi2, p, q, r)
                        }
                    };
                    row += wa * wb * wc * v;
                }
            }
            Ok(row)
        })
        .collect();
    ordered_sum(rows)
}

/// `∫ L_{abc}(g) ψ²_{abc}(g′) da db dc` for the split used by the `(κ⊗id)`
/// order; equals `φ(g g′)` when the split is right.
pub fn coproduct_from_plane_waves(
    phi: &ClosedFormFunction,
    lambda: f64,
    g: [f64; 3],
    g2: [f64; 3],
    res: AxiomResolution,
) -> Result<C64> {
    let inv = InverseFourier::new(phi, res.c_half_width, res.c_step)?;
    let ab = symmetric_nodes(res.half_width, res.step);
    let s = (-lambda * g2[2]).exp();
    let rows: Vec<Result<C64>> = ab
        .par_iter()
        .map(|&(a, wa)| {
            let mut row = C64::new(0.0, 0.0);
            for &(b, wb) in &ab {
                for (k, &(c, wc)) in inv.c_nodes().iter().enumerate() {
                    let leg1 = ebar(g[0] * a + g[1] * b + g[2] * c);
                    let leg2 = s * s * inv.eval(s * a, s * b, k) * ebar(s * (g2[0] * a + g2[1] * b) + g2[2] * c);
                    row += wa * wb * wc * leg1 * leg2;
                }
            }
            Ok(row)
        })
        .collect();
    ordered_sum(rows)
}

/// Trapezoid resolution for the left-invariance quadratures.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureResolution {
    pub half_width: f64,
    pub step: f64,
    pub r_intervals: usize,
}

impl Default for QuadratureResolution {
    fn default() -> Self {
        Self { half_width: 6.0, step: 1.0 / 16.0, r_intervals: 96 }
    }
}

fn overlap(a: (f64, f64), b: (f64, f64)) -> Option<(f64, f64)> {
    let (lo, hi) = (a.0.max(b.0), a.1.min(b.1));
    (lo < hi).then_some((lo, hi))
}

fn vee1(f: &ClosedFormFunction, x: f64, y: f64, r: f64) -> C64 {
    f.vee(&[x], &[y], r, 0.0).expect("checked plain")
}

/// `(id⊗h)((1⊗φ)(Δψ))(p,q,r) = h(φ × χ)` with
/// `χ(p′,q′,r′) = ψ(e^{λr′}p + p′, e^{λr′}q + q′, r + r′)`, both factors
/// sampled on `grid` and multiplied by the FFT pipeline.
pub fn haar_left_grid(grid: Grid, phi: &ClosedFormFunction, psi: &ClosedFormFunction, params: &ModelParams, point: [f64; 3]) -> Result<C64> {
    require_plain(phi)?;
    require_plain(psi)?;
    let [p, q, r] = point;
    let lambda = params.lambda;
    let f = SampledFunction::sample(grid, phi)?;
    let chi = SampledFunction::from_fn(grid, Picture::Pqr, |p2, q2, r2| {
        let s = (lambda * r2).exp();
        psi.eval(&[s * p + p2], &[s * q + q2], r + r2, 0.0)
    });
    haar(&deformed_mul(&f, &chi, params)?)
}

/// The same quantity as
/// `∫ ē[e^{λr′}(pa + qb)] e[ℏη(r′)ab] φ^∨(−a,−b,r′) ψ^∨(a,b,r+r′) da db dr′`.
pub fn haar_left_quadrature(
    phi: &ClosedFormFunction,
    psi: &ClosedFormFunction,
    params: &ModelParams,
    point: [f64; 3],
    res: QuadratureResolution,
) -> Result<C64> {
    require_plain(phi)?;
    require_plain(psi)?;
    let [p, q, r] = point;
    let (lo, hi) = psi.r_bump.support();
    let Some((lo, hi)) = overlap(phi.r_bump.support(), (lo - r, hi - r)) else {
        return Ok(C64::new(0.0, 0.0));
    };
    let rs = nodes(lo, hi, res.r_intervals);
    let ab = symmetric_nodes(res.half_width, res.step);
    let rows: Vec<Result<C64>> = rs
        .par_iter()
        .map(|&(r2, wr)| {
            let s = (params.lambda * r2).exp();
            let he = params.heta(r2);
            let mut acc = C64::new(0.0, 0.0);
            for &(a, wa) in &ab {
                for &(b, wb) in &ab {
                    let v = ebar(s * (p * a + q * b)) * e(he * a * b) * vee1(phi, -a, -b, r2) * vee1(psi, a, b, r + r2);
                    acc += wa * wb * v;
                }
            }
            Ok(wr * acc)
        })
        .collect();
    ordered_sum(rows)
}

/// `κ(Y)(p,q,r)` with `Y = (id⊗h)((Δφ)(1⊗ψ))`, through
/// `κY(p,q,r) = e^{2λr} ∫ ē[px + qy + ℏη(r)xy] Ŷ(e^{λr}x, e^{λr}y, −r) dx dy`,
/// `Ŷ(k, s) = ∫ e^{−2λr′} φ^∨(−e^{−λr′}k, s + r′) ψ^∨(e^{−λr′}k, r′) e[ℏη(r′)e^{−2λr′}k₁k₂] dr′`.
pub fn haar_right_quadrature(
    phi: &ClosedFormFunction,
    psi: &ClosedFormFunction,
    params: &ModelParams,
    point: [f64; 3],
    res: QuadratureResolution,
) -> Result<C64> {
    require_plain(phi)?;
    require_plain(psi)?;
    let [p, q, r] = point;
    let lambda = params.lambda;
    let s_slow = -r;
    let (lo, hi) = phi.r_bump.support();
    let Some((lo, hi)) = overlap(psi.r_bump.support(), (lo - s_slow, hi - s_slow)) else {
        return Ok(C64::new(0.0, 0.0));
    };
    let rs = nodes(lo, hi, res.r_intervals);
    let xy = symmetric_nodes(res.half_width, res.step);
    let scale = (lambda * r).exp();
    let y_hat = |k1: f64, k2: f64| -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for &(r2, wr) in &rs {
            let m = (-lambda * r2).exp();
            let v = m * m
                * vee1(phi, -m * k1, -m * k2, s_slow + r2)
                * vee1(psi, m * k1, m * k2, r2)
                * e(params.heta(r2) * m * m * k1 * k2);
            acc += wr * v;
        }
        acc
    };
    let he = params.heta(r);
    let rows: Vec<Result<C64>> = xy
        .par_iter()
        .map(|&(x, wx)| {
            let mut acc = C64::new(0.0, 0.0);
            for &(y, wy) in &xy {
                acc += wx * wy * ebar(p * x + q * y + he * x * y) * y_hat(scale * x, scale * y);
            }
            Ok(acc)
        })
        .collect();
    Ok(scale * scale * ordered_sum(rows)?)
}

/// `h(κφ) / h(φ)` from the grid antipode and from `∫ e^{−2λr}φ / ∫ φ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WitnessRatio {
    pub grid: C64,
    pub oracle: f64,
}

pub fn haar_antipode_ratio(grid: Grid, phi: &ClosedFormFunction, params: &ModelParams) -> Result<(WitnessRatio, SampledFunction)> {
    require_plain(phi)?;
    let f = SampledFunction::sample(grid, phi)?;
    let k = crate::algebra::antipode_closed(grid, phi, params)?;
    let ratio = haar(&k)? / haar(&f)?;
    let (lo, hi) = phi.r_bump.support();
    let rs = nodes(lo, hi, 4000);
    let num: f64 = rs.iter().map(|&(r, w)| w * (-2.0 * params.lambda * r).exp() * phi.r_bump.eval(r)).sum();
    let den: f64 = rs.iter().map(|&(r, w)| w * phi.r_bump.eval(r)).sum();
    Ok((WitnessRatio { grid: ratio, oracle: num / den }, f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Axis, Bump};

    fn phi() -> ClosedFormFunction {
        ClosedFormFunction::gaussian1([0.1, -0.05, 1.2, 1.25, 0.1, -0.05], Bump::new(0.0, 0.5))
    }

    fn psi() -> ClosedFormFunction {
        ClosedFormFunction::gaussian1([-0.05, 0.1, 1.15, 1.2, -0.05, 0.1], Bump::new(0.0, 0.5))
    }

    #[test]
    fn inverse_fourier_integrates_to_origin_value() {
        let f = phi();
        let inv = InverseFourier::new(&f, 64.0, 1.0).unwrap();
        let ab = symmetric_nodes(8.0, 0.125);
        let mut acc = C64::new(0.0, 0.0);
        for &(a, wa) in &ab {
            for &(b, wb) in &ab {
                for (k, &(_, wc)) in inv.c_nodes().iter().enumerate() {
                    acc += wa * wb * wc * inv.eval(a, b, k);
                }
            }
        }
        let want = f.eval(&[0.0], &[0.0], 0.0, 0.0);
        assert!((acc - want).norm() < 1e-8, "{acc} {want}");
    }

    #[test]
    fn antipode_axiom_both_orders() {
        let f = phi();
        let want = f.eval(&[0.0], &[0.0], 0.0, 0.0);
        for order in [AxiomOrder::IdKappa, AxiomOrder::KappaId] {
            let v = antipode_axiom(&f, 0.8, order, [0.3, -0.4, 0.2], AxiomResolution::default()).unwrap();
            assert!((v - want).norm() < 1e-6, "{order:?} {v} {want}");
        }
    }

    #[test]
    fn plane_wave_split_of_coproduct() {
        let f = phi();
        let (g, g2) = ([0.3, -0.2, 0.1], [-0.25, 0.4, 0.15]);
        let got = coproduct_from_plane_waves(&f, 0.8, g, g2, AxiomResolution::default()).unwrap();
        let s = (0.8f64 * g2[2]).exp();
        let want = f.eval(&[s * g[0] + g2[0]], &[s * g[1] + g2[1]], g[2] + g2[2], 0.0);
        assert!((got - want).norm() < 1e-7, "{got} {want}");
    }

    #[test]
    fn left_invariance_routes_agree() {
        let params = ModelParams::new(1, 1.0, 1.0).unwrap();
        let grid = Grid::self_dual(64, 0.55, 64).unwrap();
        let pt = [0.3, -0.2, 0.15];
        let a = haar_left_grid(grid, &phi(), &psi(), &params, pt).unwrap();
        let b = haar_left_quadrature(&phi(), &psi(), &params, pt, QuadratureResolution::default()).unwrap();
        let c = haar_right_quadrature(&phi(), &psi(), &params, pt, QuadratureResolution::default()).unwrap();
        assert!((a - b).norm() < 1e-7 * b.norm().max(1e-3), "{a} {b}");
        assert!((b - c).norm() < 1e-7 * b.norm().max(1e-3), "{b} {c}");
    }

    #[test]
    fn non_unimodular_ratio() {
        let params = ModelParams::new(1, 1.0, 1.0).unwrap();
        let grid = Grid::new(Axis::new(4.0, 64).unwrap(), Axis::new(1.6, 128).unwrap());
        let f = ClosedFormFunction::gaussian1([0.1, -0.05, 1.6, 1.6, 0.1, -0.05], Bump::new(1.0, 0.5));
        let (w, _) = haar_antipode_ratio(grid, &f, &params).unwrap();
        assert!((w.grid.re - w.oracle).abs() < 1e-6 && w.grid.im.abs() < 1e-6, "{w:?}");
        assert!((w.oracle - 1.0).abs() > 0.1);
    }
}
