//! The two semiclassical limits: ℏ → 0 for the deformed product and λ → 0
//! for the conjugation by the quantum R-matrix on two-leg functions.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use super::closed_form::{ClosedFormFunction, Point8, TwoLegFunction};
use super::grid::{Grid, Picture, SampledFunction};
use super::product::deformed_mul;
use crate::expr::{coord, cst, eta_of, exp, CoordExpr};
use crate::groups::eta;
use crate::lie::poisson::bracket_from_gradients;
use crate::{ebar, Error, ModelParams, Result, C64};

/// Grid L¹ and L² norms of a defect function.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LimitDefect {
    pub l1: f64,
    pub l2: f64,
}

/// `‖(φ×ψ − ψ×φ)/ℏ − (i/2π){φ,ψ}‖` on the grid.
pub fn semiclassical_defect(
    grid: Grid,
    phi: &ClosedFormFunction,
    psi: &ClosedFormFunction,
    params: &ModelParams,
) -> Result<LimitDefect> {
    if params.hbar == 0.0 {
        return Err(Error::InvalidParams("the semiclassical defect needs hbar != 0".into()));
    }
    let f = SampledFunction::sample(grid, phi)?;
    let g = SampledFunction::sample(grid, psi)?;
    let comm = deformed_mul(&f, &g, params)?.sub(&deformed_mul(&g, &f, params)?)?;
    let lambda = params.lambda;
    let mut bracket = SampledFunction::zeros(grid, Picture::Pqr);
    let p = grid.fast.coords();
    let n = grid.fast.points;
    let grads = |c: &ClosedFormFunction, a: f64, b: f64, r: f64| c.grad_pq(&[a], &[b], r, 0.0);
    phi.grad_pq(&[0.0], &[0.0], 0.0, 0.0)?;
    psi.grad_pq(&[0.0], &[0.0], 0.0, 0.0)?;
    bracket.data.par_chunks_mut(n * n).enumerate().for_each(|(k, o)| {
        let r = grid.r.coord(k);
        for i in 0..n {
            for j in 0..n {
                let d1 = grads(phi, p[i], p[j], r).unwrap();
                let d2 = grads(psi, p[i], p[j], r).unwrap();
                o[i * n + j] = bracket_from_gradients(lambda, r, (&d1.0, &d1.1), (&d2.0, &d2.1));
            }
        }
    });
    let i2pi = C64::new(0.0, 1.0 / (2.0 * PI));
    let defect = comm.zip_with(&bracket, |c, b| c / params.hbar - i2pi * b)?;
    Ok(LimitDefect { l1: defect.norm_l1(), l2: defect.norm_l2() })
}

/// Point and phase of `Ψ_λ(F)(x) = phase·F(point)`.
pub fn psi_substitution(lambda: f64, x: &Point8) -> (Point8, C64) {
    let [p, q, r, w, p2, q2, r2, w2] = *x;
    let (er, er2) = ((lambda * r).exp(), (lambda * r2).exp());
    let ew = (w - w2).exp();
    let point = [
        er2 * p,
        q / er2 + 2.0 * lambda / (er * er2) * eta(lambda, r) * q2,
        r,
        w,
        er * p2 - 2.0 * lambda * ew * eta(lambda, r2) * p,
        q2 / er,
        r2,
        w2,
    ];
    let phase = ebar(2.0 * lambda / er * p * q2 * (1.0 - ew));
    (point, phase)
}

/// `Ψ_λ(F)` at a point.
pub fn psi_transform(f: &TwoLegFunction, lambda: f64, x: &Point8) -> C64 {
    let (pt, ph) = psi_substitution(lambda, x);
    ph * f.eval(&pt)
}

/// The same map written in the expression language: eight argument
/// expressions and the phase `t` of the factor `ē[t]`.
pub fn psi_substitution_exprs(lambda: f64) -> (Vec<CoordExpr>, CoordExpr) {
    let (p, q, r, w, p2, q2, r2, w2) = (coord(0), coord(1), coord(2), coord(3), coord(4), coord(5), coord(6), coord(7));
    let ew = exp(w.clone() - w2.clone());
    let args = vec![
        exp(lambda * r2.clone()) * p.clone(),
        exp(-lambda * r2.clone()) * q
            + (2.0 * lambda) * exp(-lambda * (r.clone() + r2.clone())) * eta_of(lambda, r.clone()) * q2.clone(),
        r.clone(),
        w,
        exp(lambda * r.clone()) * p2 - (2.0 * lambda) * ew.clone() * eta_of(lambda, r2.clone()) * p.clone(),
        exp(-lambda * r.clone()) * q2.clone(),
        r2,
        w2,
    ];
    let phase = (2.0 * lambda) * exp(-lambda * r) * p * q2 * (cst(1.0) - ew);
    (args, phase)
}

/// `[ψ, F]` through its local form:
/// `(2pq′ − 2e^{w−w′}pq′)F − (1/2πi)[r(p′F_{p′} − q′F_{q′}) + r′(pF_p − qF_q) + 2rq′F_q − 2r′e^{w−w′}pF_{p′}]`.
pub fn r_classical_commutator(f: &TwoLegFunction, x: &Point8) -> Result<C64> {
    let [p, q, r, w, p2, q2, r2, w2] = *x;
    let v = f.eval(x);
    let [fp, fq, fp2, fq2] = f.grad_fast(x)?;
    let ew = (w - w2).exp();
    let local = r * (p2 * fp2 - q2 * fq2) + r2 * (p * fp - q * fq) + 2.0 * r * q2 * fq - 2.0 * r2 * ew * p * fp2;
    Ok((2.0 * p * q2 * (1.0 - ew)) * v - local / C64::new(0.0, 2.0 * PI))
}

/// Sampling of the brute-force oracle for `[ψ, F]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleResolution {
    pub points: usize,
    pub half_width: f64,
    /// The cutoff equals 1 for `|v| ≤ plateau` ...
    pub plateau: f64,
    /// ... and vanishes for `|v| ≥ cutoff`.
    pub cutoff: f64,
}

impl Default for OracleResolution {
    fn default() -> Self {
        Self { points: 48, half_width: 4.0, plateau: 1.5, cutoff: 3.5 }
    }
}

fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        (-1.0 / t).exp()
    }
}

fn plateau_cutoff(v: f64, a: f64, b: f64) -> f64 {
    let t = ((v.abs() - a) / (b - a)).clamp(0.0, 1.0);
    let (u, d) = (smooth_step(1.0 - t), smooth_step(t));
    u / (u + d)
}

/// Evaluates the oscillatory integral defining `[ψ, F]` with no local
/// reduction. With `v = (w̃, w̃̃, p̃, q̃)` and dual `σ = (s̃, s̃̃, x̃, ỹ)`,
/// `G(v) = F(e^{w̃}p, e^{−w̃}q + q̃, r, w, e^{w̃̃}p′ + p̃, e^{−w̃̃}q′, r′, w′)`
/// is sampled on a 4-D grid, multiplied by a smooth cutoff that is 1 near
/// `v = 0`, transformed with the `e` kernel, weighted by the polynomial in `σ`
/// and summed.
pub fn r_classical_commutator_oracle(f: &TwoLegFunction, x: &Point8, res: OracleResolution) -> Result<C64> {
    let n = res.points;
    if !n.is_multiple_of(4) {
        return Err(Error::Grid("oracle point count must be divisible by 4".into()));
    }
    let [p, q, r, w, p2, q2, r2, w2] = *x;
    let d = 2.0 * res.half_width / n as f64;
    let v: Vec<f64> = (0..n).map(|k| -res.half_width + k as f64 * d).collect();
    let cut: Vec<f64> = v.iter().map(|&t| plateau_cutoff(t, res.plateau, res.cutoff)).collect();
    let total = n * n * n * n;
    let mut data = vec![C64::new(0.0, 0.0); total];
    data.par_chunks_mut(n * n * n).enumerate().for_each(|(a, block)| {
        let (ea, eia) = (v[a].exp(), (-v[a]).exp());
        for b in 0..n {
            let (eb, eib) = (v[b].exp(), (-v[b]).exp());
            for c in 0..n {
                for dd in 0..n {
                    let wgt = cut[a] * cut[b] * cut[c] * cut[dd];
                    if wgt == 0.0 {
                        continue;
                    }
                    let pt = [ea * p, eia * q + v[dd], r, w, eb * p2 + v[c], eib * q2, r2, w2];
                    block[(b * n + c) * n + dd] = f.eval(&pt) * wgt;
                }
            }
        }
    });
    let fft: Arc<dyn Fft<f64>> = FftPlanner::new().plan_fft_inverse(n);
    for axis in 0..4 {
        let stride = n.pow(3 - axis as u32);
        transform_strided(&mut data, n, stride, fft.as_ref(), d);
    }
    let ds = 1.0 / (n as f64 * d);
    let s: Vec<f64> = (0..n).map(|k| -0.5 * n as f64 * ds + k as f64 * ds).collect();
    let ew = (w - w2).exp();
    let c0 = 2.0 * p * q2 * (1.0 - ew);
    let partial: Vec<C64> = data
        .par_chunks(n * n * n)
        .enumerate()
        .map(|(a, block)| {
            let mut acc = C64::new(0.0, 0.0);
            for b in 0..n {
                for c in 0..n {
                    for dd in 0..n {
                        let poly = r * s[b] + r2 * s[a] + c0 + 2.0 * r * q2 * s[dd] - 2.0 * r2 * ew * p * s[c];
                        acc += poly * block[(b * n + c) * n + dd];
                    }
                }
            }
            acc
        })
        .collect();
    Ok(partial.iter().sum::<C64>() * ds.powi(4))
}

/// Centred `e`-kernel transform along the axis with the given stride.
fn transform_strided(data: &mut [C64], n: usize, stride: usize, fft: &dyn Fft<f64>, delta: f64) {
    let block = stride * n;
    let sign = |j: usize| if j.is_multiple_of(2) { 1.0 } else { -1.0 };
    data.par_chunks_mut(block).for_each(|chunk| {
        let mut line = vec![C64::new(0.0, 0.0); n];
        let mut scratch = vec![C64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        for off in 0..stride {
            for j in 0..n {
                line[j] = chunk[off + j * stride] * sign(j);
            }
            fft.process_with_scratch(&mut line, &mut scratch);
            for m in 0..n {
                chunk[off + m * stride] = line[m] * sign(m) * delta;
            }
        }
    });
}

/// Monte-Carlo settings for 8-D L¹ integrals.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MonteCarlo {
    pub samples: usize,
    pub seed: u64,
    /// Proposal standard deviation in units of each Gaussian's natural one.
    pub spread: f64,
}

impl Default for MonteCarlo {
    fn default() -> Self {
        Self { samples: 1 << 20, seed: 20240611, spread: 1.6 }
    }
}

const CHUNK: usize = 1 << 14;

/// Importance sampler: Gaussian in the fast coordinates around the factors
/// of `F`, uniform on the bump supports in the slow ones.
struct Proposal {
    fast: [(f64, f64); 4],
    slow: [(f64, f64); 4],
}

impl Proposal {
    fn new(f: &TwoLegFunction, spread: f64) -> Result<Self> {
        let legs = [&f.first, &f.second];
        for l in legs {
            if l.n() != 1 || !l.poly.is_empty() {
                return Err(Error::Unsupported("Monte-Carlo proposal needs n = 1 Gaussian legs".into()));
            }
        }
        let sd = |g: &super::GaussFactor| (g.center, spread * g.width / (2.0 * PI).sqrt());
        let sup = |c: &ClosedFormFunction| c.w_bump.map_or((-1.0, 1.0), |b| b.support());
        Ok(Self {
            fast: [sd(&f.first.p[0]), sd(&f.first.q[0]), sd(&f.second.p[0]), sd(&f.second.q[0])],
            slow: [f.first.r_bump.support(), sup(&f.first), f.second.r_bump.support(), sup(&f.second)],
        })
    }

    /// A point and its proposal density.
    fn draw<R: Rng>(&self, rng: &mut R, normal: &Normal<f64>) -> (Point8, f64) {
        let mut x = [0.0; 8];
        let mut dens = 1.0;
        for (k, &(c, s)) in self.fast.iter().enumerate() {
            let z = normal.sample(rng);
            x[[0, 1, 4, 5][k]] = c + s * z;
            dens *= (-0.5 * z * z).exp() / (s * (2.0 * PI).sqrt());
        }
        for (k, &(lo, hi)) in self.slow.iter().enumerate() {
            x[[2, 3, 6, 7][k]] = rng.gen_range(lo..hi);
            dens /= hi - lo;
        }
        (x, dens)
    }
}

/// Fixed-seed importance-sampled `(∫|g|, (∫|g|²)^{1/2})` for several integrands
/// sharing the same sample points. Chunks use independent substreams and are
/// summed in order, so the result does not depend on the thread count.
pub fn monte_carlo_norms<G>(f: &TwoLegFunction, mc: MonteCarlo, count: usize, g: G) -> Result<Vec<LimitDefect>>
where
    G: Fn(&Point8) -> Result<Vec<C64>> + Sync,
{
    let prop = Proposal::new(f, mc.spread)?;
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let chunks = mc.samples.div_ceil(CHUNK);
    let partial: Vec<Result<Vec<(f64, f64)>>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = crate::rng::substream(mc.seed, "limit-monte-carlo", c as u64);
            let mut acc = vec![(0.0, 0.0); count];
            let m = CHUNK.min(mc.samples - c * CHUNK);
            for _ in 0..m {
                let (x, dens) = prop.draw(&mut rng, &normal);
                let vals = g(&x)?;
                for (a, v) in acc.iter_mut().zip(vals) {
                    a.0 += v.norm() / dens;
                    a.1 += v.norm_sqr() / dens;
                }
            }
            Ok(acc)
        })
        .collect();
    let mut tot = vec![(0.0, 0.0); count];
    for part in partial {
        for (t, a) in tot.iter_mut().zip(part?) {
            t.0 += a.0;
            t.1 += a.1;
        }
    }
    let nn = mc.samples as f64;
    Ok(tot.into_iter().map(|(a, b)| LimitDefect { l1: a / nn, l2: (b / nn).sqrt() }).collect())
}

/// `‖(Ψ_λ(F) − F)/λ − (−2πi)[ψ,F]‖` for each λ, on common sample points.
pub fn r_classical_limit_defects(f: &TwoLegFunction, lambdas: &[f64], mc: MonteCarlo) -> Result<Vec<LimitDefect>> {
    if lambdas.contains(&0.0) {
        return Err(Error::InvalidParams("the classical-limit quotient needs lambda != 0".into()));
    }
    let m2pi = C64::new(0.0, -2.0 * PI);
    monte_carlo_norms(f, mc, lambdas.len(), |x| {
        let base = f.eval(x);
        let comm = r_classical_commutator(f, x)?;
        Ok(lambdas.iter().map(|&l| (psi_transform(f, l, x) - base) / l - m2pi * comm).collect())
    })
}

pub fn r_classical_limit_defect(f: &TwoLegFunction, lambda: f64, mc: MonteCarlo) -> Result<LimitDefect> {
    Ok(r_classical_limit_defects(f, &[lambda], mc)?[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Bump;

    fn two_leg() -> TwoLegFunction {
        TwoLegFunction {
            first: ClosedFormFunction::gaussian1([0.1, -0.2, 0.9, 1.1, 0.2, -0.1], Bump::new(0.0, 0.5)).with_w_bump(Bump::new(0.1, 0.6)),
            second: ClosedFormFunction::gaussian1([0.15, 0.05, 1.0, 0.95, -0.2, 0.15], Bump::new(0.05, 0.5)).with_w_bump(Bump::new(-0.1, 0.6)),
        }
    }

    #[test]
    fn psi_closure_matches_expressions() {
        use rand::Rng;
        let f = two_leg();
        let mut rng = crate::rng::stream(11, "psi-points");
        for &lam in &[0.7, -0.4] {
            let (args, phase) = psi_substitution_exprs(lam);
            for _ in 0..32 {
                let x: Point8 = std::array::from_fn(|k| if [2, 3, 6, 7].contains(&k) { rng.gen_range(-0.4..0.4) } else { rng.gen_range(-1.5..1.5) });
                let pt: Vec<f64> = args.iter().map(|a| a.eval(&x)).collect();
                let want = ebar(phase.eval(&x)) * f.eval(&pt.try_into().unwrap());
                let got = psi_transform(&f, lam, &x);
                assert!((got - want).norm() <= 1e-12 * want.norm().max(1e-300), "{got} {want}");
            }
        }
    }

    #[test]
    fn psi_at_zero_is_identity() {
        let f = two_leg();
        let x = [0.3, -0.2, 0.1, 0.2, 0.5, -0.4, -0.1, 0.05];
        assert_eq!(psi_transform(&f, 0.0, &x), f.eval(&x));
    }

    #[test]
    fn reduction_matches_oracle() {
        let f = two_leg();
        let x = [0.45, -0.35, 0.12, -0.1, -0.4, 0.5, -0.2, 0.15];
        let want = r_classical_commutator(&f, &x).unwrap();
        let got = r_classical_commutator_oracle(&f, &x, OracleResolution::default()).unwrap();
        assert!((got - want).norm() / want.norm() < 1e-3, "{got} {want}");
    }

    #[test]
    fn commutator_is_linear() {
        let f = two_leg();
        let mut g = two_leg();
        g.first.scale = C64::new(0.3, -1.2);
        let x = [0.45, -0.35, 0.12, -0.1, -0.4, 0.5, -0.2, 0.15];
        let a = C64::new(0.7, 0.2);
        let lhs = r_classical_commutator(&f, &x).unwrap() * a + r_classical_commutator(&g, &x).unwrap();
        let mut h = f.clone();
        h.first.scale = h.first.scale * a + g.first.scale;
        let rhs = r_classical_commutator(&h, &x).unwrap();
        assert!((lhs - rhs).norm() < 1e-12 * lhs.norm());
    }

    #[test]
    fn limit_defect_decreases() {
        let f = two_leg();
        let mc = MonteCarlo { samples: 1 << 16, ..Default::default() };
        let d = r_classical_limit_defects(&f, &[0.5, 0.25, 0.125, 0.0625], mc).unwrap();
        for w in d.windows(2) {
            assert!(w[1].l1 / w[0].l1 <= 0.7, "{d:?}");
        }
    }

    #[test]
    fn semiclassical_defect_shrinks() {
        let phi = ClosedFormFunction::gaussian1([0.1, -0.05, 1.2, 1.25, 0.1, -0.05], Bump::new(0.0, 0.5));
        let psi = ClosedFormFunction::gaussian1([-0.05, 0.1, 1.15, 1.2, -0.05, 0.1], Bump::new(0.0, 0.5));
        let g = Grid::self_dual(64, 0.55, 64).unwrap();
        let d1 = semiclassical_defect(g, &phi, &psi, &ModelParams::new(1, 1.0, 0.25).unwrap()).unwrap();
        let d2 = semiclassical_defect(g, &phi, &psi, &ModelParams::new(1, 1.0, 0.125).unwrap()).unwrap();
        assert!(d2.l1 / d1.l1 <= 0.6, "{d1:?} {d2:?}");
        let same = semiclassical_defect(g, &phi, &phi, &ModelParams::new(1, 1.0, 0.5).unwrap()).unwrap();
        assert!(same.l1 < 1e-10, "{same:?}");
    }
}
