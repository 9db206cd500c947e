//! The classical r-matrix on the extended Heisenberg algebra and the
//! bialgebra data derived from it.

use num_rational::BigRational;

use super::poly::{rat, LambdaPoly};
use super::tensor::{ad_action, bracket, cybe_defect, LieAlgebraSpec, LieTensor};
use crate::{Error, Result};

/// `r = λ(z⊗d + d⊗z + 2 Σ x_i⊗y_i)` with λ kept formal.
pub fn classical_r_matrix(n: usize) -> (LieAlgebraSpec, LieTensor) {
    let alg = LieAlgebraSpec::extended_heisenberg(n);
    let z = 2 * n;
    let d = 2 * n + 1;
    let lam = LambdaPoly::lambda_times(rat(1, 1));
    let two_lam = LambdaPoly::lambda_times(rat(2, 1));
    let mut r = LieTensor::zero(&alg, 2);
    r.set(&[z, d], lam.clone());
    r.set(&[d, z], lam);
    for i in 0..n {
        r.set(&[i, n + i], two_lam.clone());
    }
    (alg, r)
}

/// `r` with λ replaced by a rational value.
pub fn classical_r_matrix_at(n: usize, lambda: &BigRational) -> Result<(LieAlgebraSpec, LieTensor)> {
    if num_traits::Zero::is_zero(lambda) {
        return Err(Error::InvalidParams("classical r-matrix needs lambda != 0".into()));
    }
    let (alg, r) = classical_r_matrix(n);
    Ok((alg, r.eval_lambda(lambda)))
}

/// Indices of `x_1..x_n, y_1..y_n, z` inside `𝔥̃`, i.e. the `𝔥` basis.
pub fn heisenberg_indices(n: usize) -> std::ops::Range<usize> {
    0..2 * n + 1
}

/// `(ad_X⊗1 + 1⊗ad_X)(t)` for every `X` in the `𝔥` part of the basis.
pub fn ad_invariance_defect(alg: &LieAlgebraSpec, n: usize, t: &LieTensor) -> Result<Vec<(String, LieTensor)>> {
    heisenberg_indices(n)
        .map(|i| Ok((alg.labels[i].clone(), ad_action(alg, i, t)?)))
        .collect()
}

/// `r₁₂ + r₂₁`.
pub fn symmetric_part(r: &LieTensor) -> Result<LieTensor> {
    r.add(&r.flip()?)
}

/// `δ(X) = ad_X(r)`.
pub fn delta_cocycle(alg: &LieAlgebraSpec, x: usize, r: &LieTensor) -> Result<LieTensor> {
    ad_action(alg, x, r)
}

/// `δ([X,Y]) − ad_X δ(Y) + ad_Y δ(X)`, zero for a 1-cocycle.
pub fn cocycle_law_defect(alg: &LieAlgebraSpec, x: usize, y: usize, r: &LieTensor) -> Result<LieTensor> {
    let xy = bracket(&LieTensor::basis(alg, x), &LieTensor::basis(alg, y), alg)?;
    let mut lhs = LieTensor::zero(alg, 2);
    for k in 0..alg.dim() {
        let c = xy.get(&[k]);
        if !c.is_zero() {
            lhs = lhs.add(&delta_cocycle(alg, k, r)?.scale(c))?;
        }
    }
    let rhs = ad_action(alg, x, &delta_cocycle(alg, y, r)?)?.sub(&ad_action(alg, y, &delta_cocycle(alg, x, r)?)?)?;
    lhs.sub(&rhs)
}

fn check_dual(h: &LieAlgebraSpec, g: &LieAlgebraSpec) -> Result<()> {
    if h.dim() != g.dim() {
        return Err(Error::AlgebraMismatch(format!("{} and {} are not dual", h.name, g.name)));
    }
    Ok(())
}

/// `[μ,ν]` in the dual algebra reconstructed from `⟨[μ,ν],X⟩ = ⟨μ⊗ν, δ(X)⟩`,
/// with `p_i, q_i, r (, s)` dual to `x_i, y_i, z (, d)`.
pub fn dual_bracket_from_delta(
    h: &LieAlgebraSpec,
    g: &LieAlgebraSpec,
    mu: usize,
    nu: usize,
    r: &LieTensor,
) -> Result<LieTensor> {
    check_dual(h, g)?;
    let mut out = LieTensor::zero(g, 1);
    for k in 0..h.dim() {
        let d = delta_cocycle(h, k, r)?;
        out.set(&[k], d.get(&[mu, nu]).clone());
    }
    Ok(out)
}

/// Every pair `(μ,ν)` whose reconstructed bracket differs from the declared
/// constants of `g`.
pub fn dual_bracket_mismatches(
    h: &LieAlgebraSpec,
    g: &LieAlgebraSpec,
    r: &LieTensor,
) -> Result<Vec<(String, String)>> {
    let mut bad = Vec::new();
    for mu in 0..g.dim() {
        for nu in 0..g.dim() {
            let rec = dual_bracket_from_delta(h, g, mu, nu, r)?;
            let decl = bracket(&LieTensor::basis(g, mu), &LieTensor::basis(g, nu), g)?;
            if rec != decl {
                bad.push((g.labels[mu].clone(), g.labels[nu].clone()));
            }
        }
    }
    Ok(bad)
}

/// Dual map of the bracket of `h`: `⟨θ(μ), X⊗Y⟩ = ⟨μ, [X,Y]⟩`.
pub fn theta(h: &LieAlgebraSpec, g: &LieAlgebraSpec, mu: usize) -> Result<LieTensor> {
    check_dual(h, g)?;
    let d = h.dim();
    let mut out = LieTensor::zero(g, 2);
    for i in 0..d {
        for j in 0..d {
            out.set(&[i, j], h.c(i, j, mu).clone());
        }
    }
    Ok(out)
}

/// `θ(p_i) = θ(q_i) = 0`, `θ(r) = Σ p_i∧q_i`.
pub fn theta_closed_form(g: &LieAlgebraSpec, n: usize, mu: usize) -> Result<LieTensor> {
    let mut out = LieTensor::zero(g, 2);
    if mu == 2 * n {
        for i in 0..n {
            let w = LieTensor::wedge(&LieTensor::basis(g, i), &LieTensor::basis(g, n + i))?;
            out = out.add(&w)?;
        }
    }
    Ok(out)
}

/// `⟨T, e_i ⊗ e_j⟩` for an order-2 tensor over the dual basis.
pub fn pairing2(t: &LieTensor, i: usize, j: usize) -> LambdaPoly {
    t.get(&[i, j]).clone()
}

/// Basis triples `(μ, X, Y)` where `⟨θ(μ), X⊗Y⟩ ≠ ⟨μ, [X,Y]⟩`.
pub fn theta_pairing_mismatches(h: &LieAlgebraSpec, g: &LieAlgebraSpec) -> Result<Vec<(usize, usize, usize)>> {
    let mut bad = Vec::new();
    for mu in 0..g.dim() {
        let th = theta(h, g, mu)?;
        for x in 0..h.dim() {
            for y in 0..h.dim() {
                let xy = bracket(&LieTensor::basis(h, x), &LieTensor::basis(h, y), h)?;
                if pairing2(&th, x, y) != *xy.get(&[mu]) {
                    bad.push((mu, x, y));
                }
            }
        }
    }
    Ok(bad)
}

/// Floating order-2 tensor over the `𝔤` basis.
#[derive(Clone, Debug, PartialEq)]
pub struct RealTensor2 {
    pub dim: usize,
    pub data: Vec<f64>,
}

impl RealTensor2 {
    pub fn zero(dim: usize) -> Self {
        Self { dim, data: vec![0.0; dim * dim] }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn axpy(&self, a: f64, o: &Self) -> Self {
        Self { dim: self.dim, data: self.data.iter().zip(&o.data).map(|(x, y)| x + a * y).collect() }
    }
}

/// `F(r) = ((1 − e^{−2λr})/2λ) Σ p_i∧q_i`.
pub fn group_cocycle_f(r: f64, n: usize, lambda: f64) -> Result<RealTensor2> {
    if lambda == 0.0 {
        return Err(Error::InvalidParams("group cocycle F needs lambda != 0".into()));
    }
    let s = -(-2.0 * lambda * r).exp_m1() / (2.0 * lambda);
    let dim = 2 * n + 1;
    let mut t = RealTensor2::zero(dim);
    for i in 0..n {
        t.data[i * dim + n + i] = s;
        t.data[(n + i) * dim + i] = -s;
    }
    Ok(t)
}

/// Relative defect of `F(r₁+r₂) = F(r₁) + e^{−2λr₁} F(r₂)`.
pub fn cocycle_f_defect(r1: f64, r2: f64, n: usize, lambda: f64) -> Result<f64> {
    let lhs = group_cocycle_f(r1 + r2, n, lambda)?;
    let f1 = group_cocycle_f(r1, n, lambda)?;
    let f2 = group_cocycle_f(r2, n, lambda)?;
    let rhs = f1.axpy((-2.0 * lambda * r1).exp(), &f2);
    let diff = lhs.axpy(-1.0, &rhs).max_abs();
    let scale = lhs.max_abs().max(f1.max_abs()).max(f2.max_abs()).max(f64::MIN_POSITIVE);
    Ok(diff / scale)
}

/// Exact CYBE defect of `r` evaluated at a rational λ.
pub fn cybe_defect_at(n: usize, lambda: &BigRational) -> Result<LieTensor> {
    let (alg, r) = classical_r_matrix_at(n, lambda)?;
    cybe_defect(&r, &alg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lam(c: i64) -> LambdaPoly {
        LambdaPoly::lambda_times(rat(c, 1))
    }

    #[test]
    fn r_matrix_coefficients() {
        let (alg, r) = classical_r_matrix_at(1, &rat(1, 1)).unwrap();
        let x = alg.index_of("x1").unwrap();
        let y = alg.index_of("y1").unwrap();
        let z = alg.index_of("z").unwrap();
        let d = alg.index_of("d").unwrap();
        assert_eq!(*r.get(&[x, y]), LambdaPoly::int(2));
        assert!(r.get(&[y, x]).is_zero());
        assert_eq!(*r.get(&[z, d]), LambdaPoly::int(1));
        assert_eq!(*r.get(&[d, z]), LambdaPoly::int(1));
        assert!(classical_r_matrix_at(1, &rat(0, 1)).is_err());
    }

    #[test]
    fn cybe_vanishes_symbolically() {
        for n in 1..=3 {
            let (alg, r) = classical_r_matrix(n);
            assert!(cybe_defect(&r, &alg).unwrap().is_zero());
        }
    }

    #[test]
    fn perturbed_r_fails_cybe() {
        let (alg, mut r) = classical_r_matrix(1);
        r.set(&[0, 1], LambdaPoly::lambda_times(rat(3, 1)));
        assert!(!cybe_defect(&r, &alg).unwrap().is_zero());
    }

    #[test]
    fn delta_values() {
        let (alg, r) = classical_r_matrix(1);
        let x = LieTensor::basis(&alg, 0);
        let y = LieTensor::basis(&alg, 1);
        let z = LieTensor::basis(&alg, 2);
        assert_eq!(delta_cocycle(&alg, 0, &r).unwrap(), LieTensor::wedge(&x, &z).unwrap().scale(&lam(1)));
        assert_eq!(delta_cocycle(&alg, 1, &r).unwrap(), LieTensor::wedge(&y, &z).unwrap().scale(&lam(1)));
        assert!(delta_cocycle(&alg, 2, &r).unwrap().is_zero());
        assert!(delta_cocycle(&alg, 3, &r).unwrap().is_zero());
    }

    #[test]
    fn invariance_of_symmetric_part() {
        let (alg, r) = classical_r_matrix(2);
        let t = symmetric_part(&r).unwrap();
        for (_, d) in ad_invariance_defect(&alg, 2, &t).unwrap() {
            assert!(d.is_zero());
        }
    }

    #[test]
    fn invariance_witness() {
        let h = LieAlgebraSpec::heisenberg(1);
        let x = LieTensor::basis(&h, 0);
        let y = LieTensor::basis(&h, 1);
        let z = LieTensor::basis(&h, 2);
        let t = x.tensor(&y).unwrap();
        assert_eq!(ad_action(&h, 0, &t).unwrap(), x.tensor(&z).unwrap());
    }

    #[test]
    fn dual_brackets_reconstructed() {
        for n in 1..=3 {
            let (ht, r) = classical_r_matrix(n);
            assert!(dual_bracket_mismatches(&ht, &LieAlgebraSpec::dual_extended(n), &r).unwrap().is_empty());
        }
        let (ht, r) = classical_r_matrix(1);
        let g = LieAlgebraSpec::dual_extended(1);
        let p = LieTensor::basis(&g, 0);
        assert_eq!(dual_bracket_from_delta(&ht, &g, 0, 2, &r).unwrap(), p.scale(&lam(1)));
        assert!(dual_bracket_from_delta(&ht, &g, 0, 1, &r).unwrap().is_zero());
    }

    #[test]
    fn cocycle_law_holds() {
        let (alg, r) = classical_r_matrix(2);
        for x in 0..alg.dim() {
            for y in 0..alg.dim() {
                assert!(cocycle_law_defect(&alg, x, y, &r).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn theta_matches_closed_form() {
        for n in 1..=3 {
            let h = LieAlgebraSpec::heisenberg(n);
            let g = LieAlgebraSpec::dual(n);
            for mu in 0..g.dim() {
                assert_eq!(theta(&h, &g, mu).unwrap(), theta_closed_form(&g, n, mu).unwrap());
            }
            assert!(theta_pairing_mismatches(&h, &g).unwrap().is_empty());
        }
        let h = LieAlgebraSpec::heisenberg(1);
        let g = LieAlgebraSpec::dual(1);
        assert_eq!(pairing2(&theta(&h, &g, 2).unwrap(), 0, 1), LambdaPoly::int(1));
    }

    #[test]
    fn group_cocycle() {
        assert_eq!(group_cocycle_f(0.0, 1, 1.0).unwrap().max_abs(), 0.0);
        assert!(cocycle_f_defect(1.0, -1.0, 1, 1.0).unwrap() < 1e-12);
        assert!(cocycle_f_defect(0.3, 1.7, 2, -0.8).unwrap() < 1e-12);
        let h = 1e-6;
        let df = group_cocycle_f(h, 1, 1.3).unwrap().axpy(-1.0, &group_cocycle_f(-h, 1, 1.3).unwrap());
        assert!((df.get(0, 1) / (2.0 * h) - 1.0).abs() < 1e-8);
        assert!((df.get(1, 0) / (2.0 * h) + 1.0).abs() < 1e-8);
    }
}
