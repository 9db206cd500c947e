//! Suites on sampled functions and the integral identities.

use rand::Rng;

use super::integrals::{
    antipode_axiom, coproduct_from_plane_waves, haar_antipode_ratio, haar_left_grid, haar_left_quadrature, haar_right_quadrature,
    AxiomOrder, AxiomResolution, QuadratureResolution,
};
use super::{sweep_csv, sweep_rows, Artifact, Recorder, Settings, SweepRow};
use crate::algebra::{
    antipode_closed, deformed_mul, deformed_mul_oracle, involution, r_classical_commutator,
    r_classical_commutator_oracle, r_classical_limit_defects, semiclassical_defect, Axis, Bump, ClosedFormFunction, Grid,
    MonteCarlo, OracleResolution, Picture, Point8, SampledFunction, TwoLegFunction,
};
use crate::algebra::product::{self as product, sigma_cocycle_defect, twisted_conv_direct, twisted_conv_fft};
use crate::groups::{g_mul, GElement};
use crate::ops::builders::block_l;
use crate::ops::checks;
use crate::{ebar, rng, ModelParams, Result, C64};

fn first() -> ClosedFormFunction {
    ClosedFormFunction::gaussian1([0.1, -0.05, 1.2, 1.25, 0.1, -0.05], Bump::new(0.0, 0.5))
}

fn second() -> ClosedFormFunction {
    ClosedFormFunction::gaussian1([-0.05, 0.1, 1.15, 1.2, -0.05, 0.1], Bump::new(0.0, 0.5))
}

fn third() -> ClosedFormFunction {
    ClosedFormFunction::gaussian1([0.05, 0.05, 1.25, 1.15, 0.0, 0.1], Bump::new(0.0, 0.5))
}

fn two_leg() -> TwoLegFunction {
    TwoLegFunction {
        first: ClosedFormFunction::gaussian1([0.1, -0.2, 0.9, 1.1, 0.2, -0.1], Bump::new(0.0, 0.5)).with_w_bump(Bump::new(0.1, 0.6)),
        second: ClosedFormFunction::gaussian1([0.15, 0.05, 1.0, 0.95, -0.2, 0.15], Bump::new(0.05, 0.5)).with_w_bump(Bump::new(-0.1, 0.6)),
    }
}

fn params(s: &Settings) -> Result<ModelParams> {
    ModelParams::new(1, s.lambda, s.hbar)
}

fn sample(grid: Grid, f: &ClosedFormFunction) -> Result<SampledFunction> {
    SampledFunction::sample(grid, f)
}

fn rel(got: C64, want: C64) -> f64 {
    (got - want).norm() / want.norm()
}

pub(super) fn algebra(rec: &mut Recorder, s: &Settings) -> Result<()> {
    let grid = s.grid.grid()?;
    let pr = params(s)?;
    let (a, b, c) = (first(), second(), third());
    let (f, g, h) = (sample(grid, &a)?, sample(grid, &b)?, sample(grid, &c)?);
    let fg = deformed_mul(&f, &g, &pr)?;

    let left = deformed_mul(&fg, &h, &pr)?;
    let right = deformed_mul(&f, &deformed_mul(&g, &h, &pr)?, &pr)?;
    rec.upper("associativity", "(phi x psi) x chi = phi x (psi x chi)", left.rel_l2(&right)?, 1e-6);

    let mut rng = rng::stream(s.seed, "algebra-oracle-points");
    let n = grid.fast.points;
    let nr = grid.r.points;
    let idx: Vec<[usize; 3]> = (0..48)
        .map(|_| [rng.gen_range(n / 8..n - n / 8), rng.gen_range(n / 8..n - n / 8), rng.gen_range(nr / 10..nr - nr / 10)])
        .collect();
    let pts: Vec<[f64; 3]> = idx.iter().map(|&[i, j, k]| [grid.fast.coord(i), grid.fast.coord(j), grid.r.coord(k)]).collect();
    let want = deformed_mul_oracle(&a, &b, &pr, &pts)?;
    let (mut num, mut den) = (0.0, 0.0);
    for (w, &[i, j, k]) in want.iter().zip(&idx) {
        num += (fg.at(i, j, k) - w).norm_sqr();
        den += w.norm_sqr();
    }
    rec.upper("pipeline_vs_oracle", "grid product against direct quadrature of the product integral", (num / den).sqrt(), 1e-7);

    let lhs = involution(&fg, &pr)?;
    let rhs = deformed_mul(&involution(&g, &pr)?, &involution(&f, &pr)?, &pr)?;
    rec.upper("star_antimultiplicative", "(phi x psi)* = psi* x phi*", lhs.rel_l2(&rhs)?, 1e-7);
    let twice = involution(&involution(&f, &pr)?, &pr)?;
    rec.upper("star_involutive", "phi** = phi", twice.rel_l2(&f)?, 1e-10);

    let classical = ModelParams::new(1, s.lambda, 0.0)?;
    let pointwise = f.zip_with(&g, |u, v| u * v)?;
    rec.upper("hbar_zero_pointwise", "hbar = 0 gives the pointwise product", deformed_mul(&f, &g, &classical)?.rel_l2(&pointwise)?, 1e-10);

    let (fv, gv) = (SampledFunction::sample_vee(grid, &a)?, SampledFunction::sample_vee(grid, &b)?);
    let d = twisted_conv_direct(&fv, &gv, &pr)?;
    let t = twisted_conv_fft(&fv, &gv, &pr)?;
    rec.upper("engines_agree", "direct and FFT twisted convolution", d.sub(&t)?.max_abs() / d.max_abs(), 1e-10);

    let mut worst = 0.0f64;
    for _ in 0..s.trials {
        let mut v = || [rng.gen_range(-2.0..2.0)];
        let (h0, h1, h2, h3, h4, h5) = (v(), v(), v(), v(), v(), v());
        let r = rng.gen_range(-0.5..0.5);
        worst = worst.max(sigma_cocycle_defect(&pr, r, [&h0, &h1], [&h2, &h3], [&h4, &h5])?);
    }
    rec.upper("sigma_cocycle", "sigma(hh',h'') sigma(h,h') = sigma(h,h'h'') sigma(h',h'')", worst, 1e-12);
    Ok(())
}

fn plane_wave(abc: [f64; 3], g: &GElement) -> C64 {
    ebar(g.p[0] * abc[0] + g.q[0] * abc[1] + g.r * abc[2])
}

pub(super) fn counit(rec: &mut Recorder, s: &Settings) -> Result<()> {
    let grid = s.grid.grid()?;
    let pr = params(s)?;
    let (a, b) = (first(), second());
    let (f, g) = (sample(grid, &a)?, sample(grid, &b)?);
    let c = product::counit(&f)?;
    rec.upper("origin_vs_dual", "phi(0) = integral of phi-vee over the r = 0 slice", c.defect(), 1e-8);
    rec.upper("origin_value", "epsilon(phi) = phi(0,0,0)", (c.origin - a.eval(&[0.0], &[0.0], 0.0, 0.0)).norm(), 1e-14);
    let m = product::counit(&deformed_mul(&f, &g, &pr)?)?;
    let want = c.origin * product::counit(&g)?.origin;
    rec.upper("multiplicative", "epsilon(phi x psi) = epsilon(phi) epsilon(psi)", rel(m.origin, want), 1e-6);

    let mut rng = rng::stream(s.seed, "counit-plane-waves");
    let (mut left, mut right) = (0.0f64, 0.0f64);
    let e = GElement::identity(1);
    for _ in 0..s.trials {
        let abc = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
        let g = GElement { p: vec![rng.gen_range(-2.0..2.0)], q: vec![rng.gen_range(-2.0..2.0)], r: rng.gen_range(-1.0..1.0) };
        left = left.max((plane_wave(abc, &g_mul(&g, &e, s.lambda)?) - plane_wave(abc, &g)).norm());
        right = right.max((plane_wave(abc, &g_mul(&e, &g, s.lambda)?) - plane_wave(abc, &g)).norm());
    }
    rec.upper("right_counit", "(id x epsilon) Delta(L) = L", left, 0.0);
    rec.upper("left_counit", "(epsilon x id) Delta(L) = L", right, 0.0);
    Ok(())
}

fn random_point(rng: &mut impl Rng) -> [f64; 3] {
    [rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5), rng.gen_range(-0.2..0.2)]
}

pub(super) fn antipode(rec: &mut Recorder, s: &Settings) -> Result<()> {
    let (l, t, seed) = (s.lambda, s.trials, s.seed);
    let a = first();
    rec.upper("t_involution", "T^2 = 1", checks::t_involution(1, l, t, 1e-9, seed)?.max_defect, 1e-9);
    let vt = t.min(40);
    rec.upper("t_conjugation", "T L_phi T = L_{phi-dagger}", checks::t_conjugation_kernel(l, &a, vt, seed)?.rel_defect, 1e-9);
    let x = block_l(1, l, &[0.3], &[-0.2], 0.4)?;
    let flip = checks::flip_identity_affine(1, l, &x, t, 1e-9, seed)?.max_defect;
    rec.upper("flip_affine", "(T x T) Delta(L) (T x T) = Sigma Delta(T L T) Sigma", flip, 1e-6);
    let flip = checks::flip_identity_kernel(l, &a, vt, seed)?.rel_defect;
    rec.upper("flip_kernel", "(T x T) Delta(L_phi) (T x T) = Sigma Delta(L_{phi-dagger}) Sigma", flip, 1e-6);

    let grid = s.grid.grid()?;
    let pr = params(s)?;
    let b = second();
    let (f, g) = (sample(grid, &a)?, sample(grid, &b)?);
    let k = product::antipode(&f, &pr)?;
    rec.upper("order_independent", "(phi*)-dagger = (phi-dagger)*", k.order_defect, 1e-6);
    rec.upper("interpolation_residual", "boundary residual of the interpolated data", k.interpolation_residual, 1e-8);
    let closed = antipode_closed(grid, &a, &pr)?;
    rec.upper("sampled_vs_closed", "kappa from samples against kappa with the exact dagger", k.value.rel_l2(&closed)?, 1e-6);
    let lhs = product::antipode(&deformed_mul(&f, &g, &pr)?, &pr)?.value;
    let rhs = deformed_mul(&product::antipode(&g, &pr)?.value, &k.value, &pr)?;
    rec.upper("antimultiplicative", "kappa(phi x psi) = kappa(psi) x kappa(phi)", lhs.rel_l2(&rhs)?, 1e-5);
    let classical = product::antipode(&f, &ModelParams::new(1, l, 0.0)?)?.value;
    let inverse = SampledFunction::from_fn(grid, Picture::Pqr, |p, q, r| {
        let s = -(-l * r).exp();
        a.eval(&[s * p], &[s * q], -r, 0.0)
    });
    rec.upper("classical_inverse", "hbar = 0 gives phi(g^-1)", classical.rel_l2(&inverse)?, 1e-8);

    let want = a.eval(&[0.0], &[0.0], 0.0, 0.0);
    let mut rng = rng::stream(seed, "antipode-axiom-points");
    let res = AxiomResolution::default();
    let (mut id_k, mut k_id, mut split) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..s.sample_points {
        let pt = random_point(&mut rng);
        id_k = id_k.max(rel(antipode_axiom(&a, l, AxiomOrder::IdKappa, pt, res)?, want));
        k_id = k_id.max(rel(antipode_axiom(&a, l, AxiomOrder::KappaId, pt, res)?, want));
        let pt2 = random_point(&mut rng);
        let got = coproduct_from_plane_waves(&a, l, pt, pt2, res)?;
        let sc = (l * pt2[2]).exp();
        let direct = a.eval(&[sc * pt[0] + pt2[0]], &[sc * pt[1] + pt2[1]], pt[2] + pt2[2], 0.0);
        split = split.max((got - direct).norm() / want.norm());
    }
    rec.upper("axiom_id_kappa", "m(id x kappa) Delta(phi) = epsilon(phi) 1", id_k, 1e-5);
    rec.upper("axiom_kappa_id", "m(kappa x id) Delta(phi) = epsilon(phi) 1", k_id, 1e-5);
    rec.upper("coproduct_split", "plane-wave split of Delta(phi) against phi(g g')", split, 1e-7);
    Ok(())
}

/// Grid for the modular witness: wide in r so the factor e^{-2 lambda r} is visible.
fn witness_grid(s: &Settings) -> Result<Grid> {
    Ok(Grid::new(Axis::new(s.grid.half_width, s.grid.points)?, Axis::new(1.6, 2 * s.grid.r_points)?))
}

pub(super) fn haar(rec: &mut Recorder, s: &Settings) -> Result<()> {
    let grid = s.grid.grid()?;
    let pr = params(s)?;
    let (a, b) = (first(), second());
    let (f, g) = (sample(grid, &a)?, sample(grid, &b)?);
    rec.upper("integral", "h(phi) against the exact integral", rel(product::haar(&f)?, a.integral()?), 1e-8);
    let l2 = f.norm_l2().powi(2);
    let tr = product::haar(&deformed_mul(&involution(&f, &pr)?, &f, &pr)?)?;
    rec.upper("trace_norm", "h(phi* x phi) = ||phi||^2", (tr - l2).norm() / l2, 1e-6);
    let fg = product::haar(&deformed_mul(&f, &g, &pr)?)?;
    let gf = product::haar(&deformed_mul(&g, &f, &pr)?)?;
    rec.upper("trace_property", "h(phi x psi) = h(psi x phi)", rel(gf, fg), 1e-6);

    let mut rng = rng::stream(s.seed, "haar-invariance-points");
    let res = QuadratureResolution::default();
    let mut worst = 0.0f64;
    for _ in 0..s.sample_points {
        let pt = random_point(&mut rng);
        let routes = [
            haar_left_grid(grid, &a, &b, &pr, pt)?,
            haar_left_quadrature(&a, &b, &pr, pt, res)?,
            haar_right_quadrature(&a, &b, &pr, pt, res)?,
        ];
        let scale = routes.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1e-3);
        for i in 0..3 {
            for j in i + 1..3 {
                worst = worst.max((routes[i] - routes[j]).norm() / scale);
            }
        }
    }
    rec.upper("left_invariance", "(id x h)((1 x phi) Delta(psi)) = kappa((id x h)(Delta(phi)(1 x psi)))", worst, 1e-5);

    let wf = ClosedFormFunction::gaussian1([0.1, -0.05, 1.6, 1.6, 0.1, -0.05], Bump::new(1.0, 0.5));
    let (w, data) = haar_antipode_ratio(witness_grid(s)?, &wf, &pr)?;
    rec.lower("not_antipode_invariant", "|h(kappa phi) / h(phi) - 1|", (w.grid - 1.0).norm(), 0.1);
    rec.upper("witness_vs_oracle", "h(kappa phi) / h(phi) against the integral of e^{-2 lambda r} phi", (w.grid - w.oracle).norm(), 1e-6);
    rec.artifact(Artifact::Grid { name: "haar_witness.bin".into(), data });
    Ok(())
}

fn max_ratio(rows: &[SweepRow]) -> f64 {
    rows.iter().filter_map(|r| r.ratio).fold(f64::NEG_INFINITY, f64::max)
}

pub(super) fn hbar_sweep_rows(s: &Settings) -> Result<Vec<SweepRow>> {
    let grid = s.grid.grid()?;
    let (a, b) = (first(), second());
    let defects = s
        .limits
        .hbar_sweep
        .iter()
        .map(|&h| semiclassical_defect(grid, &a, &b, &ModelParams::new(1, s.lambda, h)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(sweep_rows(&s.limits.hbar_sweep, &defects))
}

fn monte_carlo(s: &Settings) -> MonteCarlo {
    MonteCarlo { samples: s.limits.samples, seed: s.seed, ..Default::default() }
}

pub(super) fn lambda_sweep_rows(s: &Settings) -> Result<Vec<SweepRow>> {
    let defects = r_classical_limit_defects(&two_leg(), &s.limits.lambda_sweep, monte_carlo(s))?;
    Ok(sweep_rows(&s.limits.lambda_sweep, &defects))
}

pub(super) fn limits(rec: &mut Recorder, s: &Settings) -> Result<()> {
    let rows = hbar_sweep_rows(s)?;
    rec.upper("hbar_sweep_ratio", "largest ratio of successive L1 defects as hbar halves", max_ratio(&rows), 0.6);
    rec.artifact(Artifact::Csv { name: "hbar_sweep.csv".into(), content: sweep_csv(&rows) });

    let grid = s.grid.grid()?;
    let a = first();
    let same = semiclassical_defect(grid, &a, &a, &ModelParams::new(1, s.lambda, 0.5)?)?;
    rec.upper("self_commutator", "phi x phi - phi x phi = {phi, phi} = 0", same.l1, 1e-10);

    let rows = lambda_sweep_rows(s)?;
    rec.upper("lambda_sweep_ratio", "largest ratio of successive L1 defects as lambda halves", max_ratio(&rows), 0.7);
    rec.artifact(Artifact::Csv { name: "lambda_sweep.csv".into(), content: sweep_csv(&rows) });

    let f = two_leg();
    let mut rng = rng::stream(s.seed, "limit-oracle-points");
    let (mut num, mut den) = (0.0f64, 0.0f64);
    for _ in 0..s.limits.oracle_points {
        let x: Point8 = std::array::from_fn(|k| if [2, 3, 6, 7].contains(&k) { rng.gen_range(-0.2..0.2) } else { rng.gen_range(-0.5..0.5) });
        let want = r_classical_commutator(&f, &x)?;
        let got = r_classical_commutator_oracle(&f, &x, OracleResolution::default())?;
        num = num.max((got - want).norm());
        den = den.max(want.norm());
    }
    rec.upper("commutator_vs_oracle", "local form of [psi, F] against the oscillatory integral", num / den, 1e-3);
    Ok(())
}
