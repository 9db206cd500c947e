//! Suites built on the exact Lie tensors and the operator engine.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{Recorder, Settings};
use crate::algebra::{Bump, ClosedFormFunction, GaussFactor};
use crate::groups::{g_mul, GElement};
use crate::lie::bialgebra::{
    ad_invariance_defect, classical_r_matrix, cocycle_f_defect, cocycle_law_defect, cybe_defect_at, dual_bracket_mismatches,
    symmetric_part, theta, theta_closed_form, theta_pairing_mismatches,
};
use crate::lie::poly::rat;
use crate::lie::tensor::{cybe_defect, LieAlgebraSpec, LieTensor};
use crate::ops::builders::*;
use crate::ops::checks;
use crate::{ebar, rng, Result};

/// Exact checks report the number of offending coefficients.
const EXACT: f64 = 0.0;

fn nonzero(t: &LieTensor) -> f64 {
    t.support().len() as f64
}

pub(super) fn lie(rec: &mut Recorder, s: &Settings) -> Result<()> {
    let mut cybe = 0.0;
    let mut formal = 0.0;
    let mut dual = 0.0;
    let mut cocycle = 0.0;
    let mut pairing = 0.0;
    let mut invariance = 0.0;
    for n in 1..=3 {
        for lam in [rat(1, 1), rat(-1, 1), rat(1, 2)] {
            cybe += nonzero(&cybe_defect_at(n, &lam)?);
        }
        let (alg, r) = classical_r_matrix(n);
        formal += nonzero(&cybe_defect(&r, &alg)?);
        dual += dual_bracket_mismatches(&alg, &LieAlgebraSpec::dual_extended(n), &r)?.len() as f64;
        for x in 0..alg.dim() {
            for y in 0..alg.dim() {
                cocycle += nonzero(&cocycle_law_defect(&alg, x, y, &r)?);
            }
        }
        let (h, g) = (LieAlgebraSpec::heisenberg(n), LieAlgebraSpec::dual(n));
        pairing += theta_pairing_mismatches(&h, &g)?.len() as f64;
        for mu in 0..g.dim() {
            if theta(&h, &g, mu)? != theta_closed_form(&g, n, mu)? {
                pairing += 1.0;
            }
        }
        for (_, d) in ad_invariance_defect(&alg, n, &symmetric_part(&r)?)? {
            invariance += nonzero(&d);
        }
    }
    rec.upper("cybe_rational", "[r12,r13]+[r12,r23]+[r13,r23] = 0 at lambda in {1,-1,1/2}", cybe, EXACT);
    rec.upper("cybe_formal", "[r12,r13]+[r12,r23]+[r13,r23] = 0 as a polynomial in lambda", formal, EXACT);
    rec.upper("dual_bracket", "<[mu,nu],X> = <mu(x)nu, delta(X)> reproduces the dual constants", dual, EXACT);
    rec.upper("delta_cocycle", "delta([X,Y]) = ad_X delta(Y) - ad_Y delta(X)", cocycle, EXACT);
    rec.upper("theta_pairing", "<theta(mu), X(x)Y> = <mu, [X,Y]>", pairing, EXACT);
    rec.upper("symmetric_part_invariant", "r12 + r21 is ad-invariant under the Heisenberg part", invariance, EXACT);

    let mut rng = rng::stream(s.seed, "lie-group-cocycle");
    let mut worst = 0.0f64;
    for _ in 0..s.trials {
        let (r1, r2) = (rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5));
        let lam = if s.lambda == 0.0 { 1.0 } else { s.lambda };
        worst = worst.max(cocycle_f_defect(r1, r2, s.n, lam)?);
    }
    rec.upper("group_cocycle", "F(r1 + r2) = F(r1) + Ad(r1) F(r2)", worst, 1e-10);
    Ok(())
}

fn nonzero_lambda(rng: &mut ChaCha8Rng) -> f64 {
    let mag = rng.gen_range(0.2..1.5);
    if rng.gen_bool(0.5) {
        mag
    } else {
        -mag
    }
}

pub(super) fn pentagon(rec: &mut Recorder, s: &Settings) -> Result<()> {
    let mut rng = rng::stream(s.seed, "pentagon-lambdas");
    let mut lams = vec![s.lambda];
    lams.extend((0..s.lambda_draws).map(|_| nonzero_lambda(&mut rng)));
    let (mut u, mut ue, mut fact, mut unit) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for (i, &l) in lams.iter().enumerate() {
        let seed = s.seed.wrapping_add(i as u64);
        u = u.max(checks::pentagon(&u_op(s.n, l), s.trials, 1e-9, seed)?.max_defect);
        ue = ue.max(checks::pentagon(&u_ext(s.n, l), s.trials, 1e-9, seed)?.max_defect);
        fact = fact.max(checks::u_factorization(s.n, l, false, s.trials, 1e-9, seed)?.max_defect);
        fact = fact.max(checks::u_factorization(s.n, l, true, s.trials, 1e-9, seed)?.max_defect);
        for op in [u_op(s.n, l), u_ext(s.n, l)] {
            unit = unit.max(op.unitarity_defect(s.trials, seed));
            unit = unit.max(op.inverse_defect(s.trials, seed)?);
        }
    }
    rec.upper("pentagon_u", "U12 U13 U23 = U23 U12", u, 1e-9);
    rec.upper("pentagon_u_extended", "U~12 U~13 U~23 = U~23 U~12", ue, 1e-9);
    rec.upper("factorization", "U = W V_sigma", fact, 1e-9);
    rec.upper("unitarity", "U U* = U* U = 1", unit, 1e-9);
    Ok(())
}

fn vec_in(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

/// `n`-leg Gaussian with mild offsets, for kernel checks.
fn gaussian(n: usize, c: [f64; 6]) -> ClosedFormFunction {
    let p = (0..n).map(|i| GaussFactor::new(c[0] + 0.05 * i as f64, c[2], c[4])).collect();
    let q = (0..n).map(|i| GaussFactor::new(c[1] - 0.05 * i as f64, c[3], c[5])).collect();
    ClosedFormFunction::gaussian(p, q, Bump::new(0.0, 0.5))
}

fn plane_wave(abc: &(Vec<f64>, Vec<f64>, f64), g: &GElement) -> crate::C64 {
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(u, v)| u * v).sum::<f64>();
    ebar(dot(&g.p, &abc.0) + dot(&g.q, &abc.1) + g.r * abc.2)
}

fn random_g(rng: &mut ChaCha8Rng, n: usize) -> GElement {
    GElement { p: vec_in(rng, n), q: vec_in(rng, n), r: rng.gen_range(-1.0..1.0) }
}

pub(super) fn comultiplication(rec: &mut Recorder, s: &Settings) -> Result<()> {
    let (n, l) = (s.n, s.lambda);
    let mut rng = rng::stream(s.seed, "comultiplication-blocks");
    let (a, b, c, d) = (vec_in(&mut rng, n), vec_in(&mut rng, n), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let (a2, b2, c2) = (vec_in(&mut rng, n), vec_in(&mut rng, n), rng.gen_range(-1.0..1.0));
    let t = s.trials;
    let seed = s.seed;

    let closed = checks::delta_block(n, l, &a, &b, c, t, 1e-9, seed)?.max_defect;
    let closed_ext = checks::delta_block_ext(n, l, &a, &b, c, d, t, 1e-9, seed)?.max_defect;
    rec.upper("delta_block", "closed form of Delta(L) = U (L x 1) U*", closed, 1e-9);
    rec.upper("delta_block_extended", "closed form of Delta~(L~) = U~ (L~ x 1) U~*", closed_ext, 1e-9);

    let hom = checks::homomorphism(n, l, (&a, &b, c), (&a2, &b2, c2), t, 1e-9, seed)?.max_defect;
    rec.upper("homomorphism", "Delta(L_g) Delta(L_g') = Delta(M) Delta(L_{g+g'})", hom, 1e-9);

    let co = checks::coassociativity(&u_op(n, l), &delta_l(n, l, &a, &b, c)?, t, 1e-9, seed)?.max_defect;
    let co_ext = checks::coassociativity(&u_ext(n, l), &delta_l_ext(n, l, &a, &b, c, d)?, t, 1e-9, seed)?.max_defect;
    rec.upper("coassociativity", "(Delta x id) Delta(L) = (id x Delta) Delta(L)", co, 1e-9);
    rec.upper("coassociativity_extended", "(Delta~ x id) Delta~(L~) = (id x Delta~) Delta~(L~)", co_ext, 1e-9);

    let abc = (a.clone(), b.clone(), c);
    let mut worst = 0.0f64;
    for _ in 0..t {
        let (g1, g2, g3) = (random_g(&mut rng, n), random_g(&mut rng, n), random_g(&mut rng, n));
        let left = plane_wave(&abc, &g_mul(&g_mul(&g1, &g2, l)?, &g3, l)?);
        let right = plane_wave(&abc, &g_mul(&g1, &g_mul(&g2, &g3, l)?, l)?);
        worst = worst.max((left - right).norm());
    }
    rec.upper("coassociativity_functions", "L((g1 g2) g3) = L(g1 (g2 g3)) for the pulled-back coproduct", worst, 1e-9);

    let phi = gaussian(n, [0.2, -0.1, 1.0, 1.1, 0.3, -0.2]);
    let g = gaussian(n, [-0.15, 0.25, 0.9, 1.0, -0.1, 0.25]);
    let k = checks::comultiplication_kernel_check(l, &phi, &g, t.min(40), seed)?;
    rec.upper("kernel_vs_operators", "explicit kernel of (Delta phi)(1 x g) = U (L_phi x 1) U* (1 x L_g)", k.rel_defect, 1e-6);
    Ok(())
}

pub(super) fn rmatrix(rec: &mut Recorder, s: &Settings) -> Result<()> {
    let (n, l, t, seed) = (s.n, s.lambda, s.trials, s.seed);
    let mut rng = rng::stream(seed, "rmatrix-blocks");
    let (a, b, c, d) = (vec_in(&mut rng, n), vec_in(&mut rng, n), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let sym = checks::opposite_block_symbolic(n, l, &a, &b, c, d, t, 1e-9, seed)?.max_defect;
    rec.upper("almost_cocommutative_symbolic", "R Delta~(L~) R* = flipped Delta~(L~), closed forms", sym, 1e-9);
    let vt = t.min(40);
    let slice = checks::almost_cocommutative(n, l, &a, &b, c, d, vt, seed)?.rel_defect;
    rec.upper("almost_cocommutative_slices", "R Delta~(L~) R* on Gaussian slice vectors", slice, 1e-5);
    let red = checks::r_kernel_reduction(n, l, vt, seed)?.rel_defect;
    rec.upper("kernel_reduction", "four-variable kernel of R = two-variable reduction", red, 1e-9);
    let mult = checks::multiplier_consistency(n, l, t, 1e-9, seed)?.max_defect;
    rec.upper("multiplier_pictures", "left and right multiplier actions compose to F -> R F R*", mult, 1e-9);
    let unit = checks::r_unitarity(n, l, vt, seed)?.rel_defect;
    rec.upper("unitarity_on_slices", "R R* = R* R = 1 on Gaussian slice vectors (partial)", unit, 1e-9);
    let r21 = checks::r21_vs_r_inverse(n, l, vt, seed)?.rel_defect;
    rec.lower("r21_differs_from_inverse", "R21 != R^-1 witness", r21, 1e-2);
    Ok(())
}

pub(super) fn qybe(rec: &mut Recorder, s: &Settings) -> Result<()> {
    let per = (s.trials / 10).max(1);
    let mut worst = 0.0f64;
    for k in 0..s.vectors {
        worst = worst.max(checks::qybe(s.n, s.lambda, per, s.seed.wrapping_add(k as u64))?.rel_defect);
    }
    rec.upper("qybe", "R12 R13 R23 = R23 R13 R12 on Gaussian slice vectors", worst, 1e-8);
    Ok(())
}

pub(super) fn quasitriangular(rec: &mut Recorder, s: &Settings) -> Result<()> {
    let per = (s.trials / 10).max(1);
    let (mut left, mut right) = (0.0f64, 0.0f64);
    for k in 0..s.vectors {
        let (a, b) = checks::quasitriangular(s.n, s.lambda, per, s.seed.wrapping_add(k as u64))?;
        left = left.max(a.rel_defect);
        right = right.max(b.rel_defect);
    }
    rec.upper("delta_first_leg", "(Delta~ x id) R = R13 R23", left, 1e-8);
    rec.upper("delta_second_leg", "(id x Delta~) R = R13 R12", right, 1e-8);
    Ok(())
}
