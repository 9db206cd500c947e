use heisqg::algebra::product::{sigma_cocycle_defect, twisted_conv_direct, twisted_conv_fft};
use heisqg::algebra::{deformed_mul, involution, Bump, ClosedFormFunction, Grid, LimitDefect, SampledFunction};
use heisqg::groups::{
    eta_identity_defect, eta_identity_scale, ext_g_mul, g_inv, g_mul, heis_inv, heis_mul, ExtGElement, GElement, HeisElement,
};
use heisqg::lie::{cybe_defect_at, rat};
use heisqg::ops::builders::{u_ext, u_op};
use heisqg::ops::checks;
use heisqg::suites::{sweep_csv, sweep_rows, Bound, Check, GridSpec, Settings, SuiteId};
use heisqg::{ModelParams, C64};
use proptest::prelude::*;

fn coord() -> impl Strategy<Value = f64> {
    -3.0..3.0f64
}

fn lambda() -> impl Strategy<Value = f64> {
    prop_oneof![-2.0..-0.1f64, 0.1..2.0f64]
}

fn g_elem() -> impl Strategy<Value = GElement> {
    (coord(), coord(), -1.0..1.0f64).prop_map(|(p, q, r)| GElement { p: vec![p], q: vec![q], r })
}

fn close(a: &GElement, b: &GElement, tol: f64) -> bool {
    let d = (a.p[0] - b.p[0]).abs() + (a.q[0] - b.q[0]).abs() + (a.r - b.r).abs();
    let s = 1.0 + a.p[0].abs() + a.q[0].abs() + a.r.abs();
    d <= tol * s
}

fn gaussian() -> impl Strategy<Value = ClosedFormFunction> {
    (-0.3..0.3f64, -0.3..0.3f64, 1.0..1.4f64, 1.0..1.4f64, -0.3..0.3f64, -0.3..0.3f64)
        .prop_map(|(a, b, c, d, e, f)| ClosedFormFunction::gaussian1([a, b, c, d, e, f], Bump::new(0.0, 0.5)))
}

fn small_grid() -> Grid {
    Grid::self_dual(16, 0.55, 8).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn group_law_is_associative(a in g_elem(), b in g_elem(), c in g_elem(), l in lambda()) {
        let left = g_mul(&g_mul(&a, &b, l).unwrap(), &c, l).unwrap();
        let right = g_mul(&a, &g_mul(&b, &c, l).unwrap(), l).unwrap();
        prop_assert!(close(&left, &right, 1e-12), "{left:?} {right:?}");
    }

    #[test]
    fn group_inverse(a in g_elem(), l in lambda()) {
        let e = g_mul(&a, &g_inv(&a, l).unwrap(), l).unwrap();
        prop_assert!(close(&e, &GElement::identity(1), 1e-12), "{e:?}");
        let e = g_mul(&g_inv(&a, l).unwrap(), &a, l).unwrap();
        prop_assert!(close(&e, &GElement::identity(1), 1e-12), "{e:?}");
    }

    #[test]
    fn extended_group_is_associative(v in prop::collection::vec(coord(), 12), l in lambda()) {
        let mk = |k: usize| ExtGElement { p: vec![v[k]], q: vec![v[k + 1]], r: v[k + 2] / 3.0, s: v[k + 3] };
        let (a, b, c) = (mk(0), mk(4), mk(8));
        let left = ext_g_mul(&ext_g_mul(&a, &b, l).unwrap(), &c, l).unwrap();
        let right = ext_g_mul(&a, &ext_g_mul(&b, &c, l).unwrap(), l).unwrap();
        let d = (left.p[0] - right.p[0]).abs() + (left.q[0] - right.q[0]).abs() + (left.r - right.r).abs() + (left.s - right.s).abs();
        prop_assert!(d < 1e-10 * (1.0 + left.p[0].abs() + left.q[0].abs() + left.s.abs()));
    }

    #[test]
    fn heisenberg_inverse(x in coord(), y in coord(), z in coord()) {
        let h = HeisElement { x: vec![x], y: vec![y], z };
        let e = heis_mul(&h, &heis_inv(&h).unwrap()).unwrap();
        prop_assert!(e.x[0].abs() + e.y[0].abs() + e.z.abs() < 1e-12 * (1.0 + x.abs() * y.abs() + z.abs()));
    }

    #[test]
    fn eta_addition_rule(l in lambda(), r in -1.0..1.0f64, rp in -1.0..1.0f64) {
        prop_assert!(eta_identity_defect(l, r, rp) <= 16.0 * f64::EPSILON * eta_identity_scale(l, r, rp));
    }

    #[test]
    fn sigma_is_a_cocycle(h in prop::collection::vec(coord(), 6), r in -0.5..0.5f64, l in lambda(), hbar in 0.0..2.0f64) {
        let p = ModelParams::new(1, l, hbar).unwrap();
        let d = sigma_cocycle_defect(&p, r, [&h[0..1], &h[1..2]], [&h[2..3], &h[3..4]], [&h[4..5], &h[5..6]]).unwrap();
        prop_assert!(d < 1e-11, "{d}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn cybe_vanishes_at_rational_lambda(num in prop_oneof![-9i64..0, 1i64..9], den in 1i64..9) {
        for n in 1..=2 {
            prop_assert!(cybe_defect_at(n, &rat(num, den)).unwrap().is_zero());
        }
    }

    #[test]
    fn pentagon_for_any_lambda(l in lambda(), seed in any::<u64>()) {
        prop_assert!(checks::pentagon(&u_op(1, l), 10, 1e-9, seed).unwrap().equal);
        prop_assert!(checks::pentagon(&u_ext(1, l), 10, 1e-9, seed).unwrap().equal);
    }

    #[test]
    fn delta_block_closed_form(l in lambda(), a in coord(), b in coord(), c in coord(), seed in any::<u64>()) {
        let r = checks::delta_block(1, l, &[a], &[b], c, 10, 1e-9, seed).unwrap();
        prop_assert!(r.equal, "{r:?}");
    }

    #[test]
    fn t_is_an_involution(l in lambda(), seed in any::<u64>()) {
        prop_assert!(checks::t_involution(1, l, 10, 1e-9, seed).unwrap().equal);
    }

    #[test]
    fn qybe_on_random_vectors(l in lambda(), seed in any::<u64>()) {
        let c = checks::qybe(1, l, 5, seed).unwrap();
        prop_assert!(c.rel_defect < 1e-8, "{c:?}");
    }

    #[test]
    fn star_is_involutive(f in gaussian(), l in lambda(), hbar in 0.0..1.5f64) {
        let p = ModelParams::new(1, l, hbar).unwrap();
        // The edge row has no mirror partner, so the data must vanish there.
        let s = SampledFunction::sample(Grid::self_dual(64, 0.55, 8).unwrap(), &f).unwrap();
        let twice = involution(&involution(&s, &p).unwrap(), &p).unwrap();
        prop_assert!(twice.rel_l2(&s).unwrap() < 1e-10, "{}", twice.rel_l2(&s).unwrap());
    }

    #[test]
    fn product_is_bilinear(f in gaussian(), g in gaussian(), h in gaussian(), re in -2.0..2.0f64, im in -2.0..2.0f64) {
        let p = ModelParams::new(1, 1.0, 1.0).unwrap();
        let grid = small_grid();
        let (f, g, h) = (SampledFunction::sample(grid, &f).unwrap(), SampledFunction::sample(grid, &g).unwrap(), SampledFunction::sample(grid, &h).unwrap());
        let a = C64::new(re, im);
        let sum = f.scale(a).zip_with(&g, |u, v| u + v).unwrap();
        let left = deformed_mul(&sum, &h, &p).unwrap();
        let right = deformed_mul(&f, &h, &p).unwrap().scale(a).zip_with(&deformed_mul(&g, &h, &p).unwrap(), |u, v| u + v).unwrap();
        prop_assert!(left.sub(&right).unwrap().max_abs() <= 1e-12 * (1.0 + right.max_abs()));
    }

    #[test]
    fn convolution_engines_agree(f in gaussian(), g in gaussian(), l in lambda()) {
        let p = ModelParams::new(1, l, 1.0).unwrap();
        let grid = small_grid();
        let (f, g) = (SampledFunction::sample_vee(grid, &f).unwrap(), SampledFunction::sample_vee(grid, &g).unwrap());
        let d = twisted_conv_direct(&f, &g, &p).unwrap();
        let t = twisted_conv_fft(&f, &g, &p).unwrap();
        prop_assert!(d.sub(&t).unwrap().max_abs() <= 1e-10 * d.max_abs());
    }

    #[test]
    fn binary_grid_round_trip(f in gaussian()) {
        let s = SampledFunction::sample(small_grid(), &f).unwrap();
        let mut bytes = Vec::new();
        s.write_binary(&mut bytes).unwrap();
        let back = SampledFunction::read_binary(bytes.as_slice()).unwrap();
        prop_assert_eq!(back.grid, s.grid);
        prop_assert!(back.sub(&s).unwrap().max_abs() <= 1e-7 * s.max_abs());
    }
}

proptest! {
    #[test]
    fn check_verdicts(defect in prop_oneof![Just(f64::NAN), Just(f64::INFINITY), 0.0..10.0f64], tol in 0.0..10.0f64) {
        let up = Check::new("c", "a", defect, tol, Bound::Upper);
        let lo = Check::new("c", "a", defect, tol, Bound::Lower);
        if defect.is_nan() {
            prop_assert!(!up.pass && !lo.pass);
        } else {
            prop_assert_eq!(up.pass, defect <= tol);
            prop_assert_eq!(lo.pass, defect > tol);
        }
        let json = serde_json::to_string(&up).unwrap();
        let back: Check = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(back.pass, up.pass);
        if defect.is_finite() {
            prop_assert_eq!(back, up);
        } else {
            prop_assert!(json.contains("\"defect\":null"));
        }
    }

    #[test]
    fn sweep_csv_round_trips(vals in prop::collection::vec((1e-6..10.0f64, 1e-9..1.0f64, 1e-9..1.0f64), 1..6)) {
        let params: Vec<f64> = vals.iter().map(|v| v.0).collect();
        let defects: Vec<LimitDefect> = vals.iter().map(|v| LimitDefect { l1: v.1, l2: v.2 }).collect();
        let rows = sweep_rows(&params, &defects);
        let csv = sweep_csv(&rows);
        let lines: Vec<&str> = csv.lines().skip(1).collect();
        prop_assert_eq!(lines.len(), vals.len());
        for (i, (line, v)) in lines.iter().zip(&vals).enumerate() {
            let cols: Vec<&str> = line.split(',').collect();
            prop_assert_eq!(cols.len(), 4);
            prop_assert_eq!(cols[0].parse::<f64>().unwrap(), v.0);
            prop_assert_eq!(cols[1].parse::<f64>().unwrap(), v.1);
            prop_assert_eq!(cols[2].parse::<f64>().unwrap(), v.2);
            if i == 0 {
                prop_assert_eq!(cols[3], "");
            } else {
                prop_assert_eq!(cols[3].parse::<f64>().unwrap(), v.1 / vals[i - 1].1);
            }
        }
    }

    #[test]
    fn grid_sizes_must_be_powers_of_two(points in 1usize..300) {
        let s = Settings { grid: GridSpec { points, ..GridSpec::default() }, ..Settings::default() };
        let ok = s.validate(&[SuiteId::Algebra]).is_ok();
        prop_assert_eq!(ok, points.is_power_of_two() && points >= 8);
    }

    #[test]
    fn classical_suites_accept_lambda_zero(hbar in 0.0..2.0f64) {
        let s = Settings { lambda: 0.0, hbar, ..Settings::default() };
        prop_assert!(s.validate(&[SuiteId::Lie, SuiteId::Limits]).is_ok());
        for id in SuiteId::ALL.into_iter().filter(|id| id.needs_nonzero_lambda()) {
            prop_assert!(s.validate(&[id]).is_err());
        }
    }
}
