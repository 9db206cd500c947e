//! Lie algebras given by exact structure constants and dense tensors over
//! their bases.

use serde::{Deserialize, Serialize};

use super::poly::{rat, LambdaPoly};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct LieAlgebraSpec {
    pub name: String,
    pub labels: Vec<String>,
    /// `c[(i*dim + j)*dim + k] = c_{ij}^k`.
    consts: Vec<LambdaPoly>,
}

impl LieAlgebraSpec {
    /// Validates antisymmetry and the Jacobi identity before accepting.
    pub fn new(name: &str, labels: Vec<String>, consts: Vec<LambdaPoly>) -> Result<Self> {
        let d = labels.len();
        if consts.len() != d * d * d {
            return Err(Error::Dimension { expected: d * d * d, got: consts.len() });
        }
        let alg = Self { name: name.into(), labels, consts };
        if let Some((i, j, k)) = alg.antisymmetry_violation() {
            return Err(Error::InvalidParams(format!(
                "structure constants not antisymmetric at ({i},{j},{k})"
            )));
        }
        if let Some((i, j, k, l)) = alg.jacobi_violation() {
            return Err(Error::InvalidParams(format!("Jacobi identity fails at ({i},{j},{k};{l})")));
        }
        Ok(alg)
    }

    fn builder(dim: usize) -> Vec<LambdaPoly> {
        vec![LambdaPoly::zero(); dim * dim * dim]
    }

    fn set(consts: &mut [LambdaPoly], dim: usize, i: usize, j: usize, k: usize, v: LambdaPoly) {
        consts[(j * dim + i) * dim + k] = -&v;
        consts[(i * dim + j) * dim + k] = v;
    }

    /// `𝔥`: basis `x_1..x_n, y_1..y_n, z` with `[x_i, y_j] = δ_ij z`.
    pub fn heisenberg(n: usize) -> Self {
        let dim = 2 * n + 1;
        let mut c = Self::builder(dim);
        for i in 0..n {
            Self::set(&mut c, dim, i, n + i, 2 * n, LambdaPoly::int(1));
        }
        Self::new("h", heis_labels(n, false), c).expect("heisenberg constants are valid")
    }

    /// `𝔥̃`: `𝔥` plus `d` with `[d, x_i] = x_i`, `[d, y_i] = -y_i`.
    pub fn extended_heisenberg(n: usize) -> Self {
        let dim = 2 * n + 2;
        let d = 2 * n + 1;
        let mut c = Self::builder(dim);
        for i in 0..n {
            Self::set(&mut c, dim, i, n + i, 2 * n, LambdaPoly::int(1));
            Self::set(&mut c, dim, d, i, i, LambdaPoly::int(1));
            Self::set(&mut c, dim, d, n + i, n + i, LambdaPoly::int(-1));
        }
        Self::new("h~", heis_labels(n, true), c).expect("extended heisenberg constants are valid")
    }

    /// `𝔤`: basis `p_1..p_n, q_1..q_n, r` with `[p_i, r] = λ p_i`, `[q_i, r] = λ q_i`.
    pub fn dual(n: usize) -> Self {
        let dim = 2 * n + 1;
        let mut c = Self::builder(dim);
        for i in 0..2 * n {
            Self::set(&mut c, dim, i, 2 * n, i, LambdaPoly::lambda_times(rat(1, 1)));
        }
        Self::new("g", dual_labels(n, false), c).expect("dual constants are valid")
    }

    /// `𝔤̃`: `𝔤` plus a central `s`.
    pub fn dual_extended(n: usize) -> Self {
        let dim = 2 * n + 2;
        let mut c = Self::builder(dim);
        for i in 0..2 * n {
            Self::set(&mut c, dim, i, 2 * n, i, LambdaPoly::lambda_times(rat(1, 1)));
        }
        Self::new("g~", dual_labels(n, true), c).expect("extended dual constants are valid")
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn c(&self, i: usize, j: usize, k: usize) -> &LambdaPoly {
        let d = self.dim();
        &self.consts[(i * d + j) * d + k]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    fn antisymmetry_violation(&self) -> Option<(usize, usize, usize)> {
        let d = self.dim();
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    if !(self.c(i, j, k) + self.c(j, i, k)).is_zero() {
                        return Some((i, j, k));
                    }
                }
            }
        }
        None
    }

    fn jacobi_violation(&self) -> Option<(usize, usize, usize, usize)> {
        let d = self.dim();
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    for l in 0..d {
                        let mut s = LambdaPoly::zero();
                        for m in 0..d {
                            s = &s + &(self.c(i, j, m) * self.c(m, k, l));
                            s = &s + &(self.c(j, k, m) * self.c(m, i, l));
                            s = &s + &(self.c(k, i, m) * self.c(m, j, l));
                        }
                        if !s.is_zero() {
                            return Some((i, j, k, l));
                        }
                    }
                }
            }
        }
        None
    }

    pub fn to_json(&self) -> AlgebraJson {
        AlgebraJson {
            name: self.name.clone(),
            labels: self.labels.clone(),
            structure_constants: self.consts.iter().map(|p| p.to_pairs()).collect(),
        }
    }

    pub fn from_json(j: &AlgebraJson) -> Result<Self> {
        let consts = j
            .structure_constants
            .iter()
            .map(|p| LambdaPoly::from_pairs(p).ok_or_else(|| Error::Config("bad rational".into())))
            .collect::<Result<Vec<_>>>()?;
        Self::new(&j.name, j.labels.clone(), consts)
    }
}

fn heis_labels(n: usize, ext: bool) -> Vec<String> {
    let mut v: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    v.extend((1..=n).map(|i| format!("y{i}")));
    v.push("z".into());
    if ext {
        v.push("d".into());
    }
    v
}

fn dual_labels(n: usize, ext: bool) -> Vec<String> {
    let mut v: Vec<String> = (1..=n).map(|i| format!("p{i}")).collect();
    v.extend((1..=n).map(|i| format!("q{i}")));
    v.push("r".into());
    if ext {
        v.push("s".into());
    }
    v
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AlgebraJson {
    pub name: String,
    pub labels: Vec<String>,
    /// Flattened `c_{ij}^k`, each a list of `[numerator, denominator]` per power of λ.
    pub structure_constants: Vec<Vec<[String; 2]>>,
}

/// Dense tensor of order 1, 2 or 3 over an algebra basis.
#[derive(Clone, Debug, PartialEq)]
pub struct LieTensor {
    pub algebra: String,
    pub dim: usize,
    pub order: usize,
    coeffs: Vec<LambdaPoly>,
}

impl LieTensor {
    pub fn zero(alg: &LieAlgebraSpec, order: usize) -> Self {
        let dim = alg.dim();
        Self { algebra: alg.name.clone(), dim, order, coeffs: vec![LambdaPoly::zero(); dim.pow(order as u32)] }
    }

    pub fn basis(alg: &LieAlgebraSpec, i: usize) -> Self {
        let mut t = Self::zero(alg, 1);
        t.coeffs[i] = LambdaPoly::int(1);
        t
    }

    pub fn basis_by_label(alg: &LieAlgebraSpec, label: &str) -> Result<Self> {
        let i = alg
            .index_of(label)
            .ok_or_else(|| Error::AlgebraMismatch(format!("no basis element {label} in {}", alg.name)))?;
        Ok(Self::basis(alg, i))
    }

    fn idx(&self, ix: &[usize]) -> usize {
        ix.iter().fold(0, |acc, &i| acc * self.dim + i)
    }

    pub fn get(&self, ix: &[usize]) -> &LambdaPoly {
        &self.coeffs[self.idx(ix)]
    }

    pub fn set(&mut self, ix: &[usize], v: LambdaPoly) {
        let k = self.idx(ix);
        self.coeffs[k] = v;
    }

    pub fn add_to(&mut self, ix: &[usize], v: &LambdaPoly) {
        let k = self.idx(ix);
        self.coeffs[k] = &self.coeffs[k] + v;
    }

    pub fn coeffs(&self) -> &[LambdaPoly] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Multi-indices of nonzero entries, for reporting.
    pub fn support(&self) -> Vec<Vec<usize>> {
        (0..self.coeffs.len())
            .filter(|&k| !self.coeffs[k].is_zero())
            .map(|k| self.unflatten(k))
            .collect()
    }

    fn unflatten(&self, mut k: usize) -> Vec<usize> {
        let mut ix = vec![0; self.order];
        for s in (0..self.order).rev() {
            ix[s] = k % self.dim;
            k /= self.dim;
        }
        ix
    }

    fn check_same(&self, o: &Self) -> Result<()> {
        if self.algebra != o.algebra || self.order != o.order || self.dim != o.dim {
            return Err(Error::AlgebraMismatch(format!(
                "{}(order {}) vs {}(order {})",
                self.algebra, self.order, o.algebra, o.order
            )));
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.check_same(o)?;
        let coeffs = self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a + b).collect();
        Ok(Self { coeffs, ..self.clone() })
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.check_same(o)?;
        let coeffs = self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a - b).collect();
        Ok(Self { coeffs, ..self.clone() })
    }

    pub fn scale(&self, s: &LambdaPoly) -> Self {
        Self { coeffs: self.coeffs.iter().map(|c| c * s).collect(), ..self.clone() }
    }

    pub fn tensor(&self, o: &Self) -> Result<Self> {
        if self.algebra != o.algebra || self.order + o.order > 3 {
            return Err(Error::AlgebraMismatch("tensor product beyond order 3 or across algebras".into()));
        }
        let n2 = o.coeffs.len();
        let mut coeffs = vec![LambdaPoly::zero(); self.coeffs.len() * n2];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                coeffs[i * n2 + j] = a * b;
            }
        }
        Ok(Self { algebra: self.algebra.clone(), dim: self.dim, order: self.order + o.order, coeffs })
    }

    /// `a ∧ b = a⊗b − b⊗a` for order-1 inputs.
    pub fn wedge(a: &Self, b: &Self) -> Result<Self> {
        a.tensor(b)?.sub(&b.tensor(a)?)
    }

    /// Swap of the two slots of an order-2 tensor.
    pub fn flip(&self) -> Result<Self> {
        if self.order != 2 {
            return Err(Error::AlgebraMismatch("flip needs an order-2 tensor".into()));
        }
        let mut t = self.clone();
        for i in 0..self.dim {
            for j in 0..self.dim {
                t.set(&[i, j], self.get(&[j, i]).clone());
            }
        }
        Ok(t)
    }

    pub fn eval_lambda(&self, lambda: &num_rational::BigRational) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| LambdaPoly::constant(c.eval(lambda))).collect(),
            ..self.clone()
        }
    }

    pub fn to_json(&self, alg: &LieAlgebraSpec) -> TensorJson {
        TensorJson {
            algebra: self.algebra.clone(),
            labels: alg.labels.clone(),
            order: self.order,
            coefficients: self.coeffs.iter().map(|c| c.to_pairs()).collect(),
        }
    }

    pub fn from_json(j: &TensorJson) -> Result<Self> {
        let dim = j.labels.len();
        if j.coefficients.len() != dim.pow(j.order as u32) {
            return Err(Error::Dimension { expected: dim.pow(j.order as u32), got: j.coefficients.len() });
        }
        let coeffs = j
            .coefficients
            .iter()
            .map(|p| LambdaPoly::from_pairs(p).ok_or_else(|| Error::Config("bad rational".into())))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { algebra: j.algebra.clone(), dim, order: j.order, coeffs })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TensorJson {
    pub algebra: String,
    pub labels: Vec<String>,
    pub order: usize,
    pub coefficients: Vec<Vec<[String; 2]>>,
}

fn check_alg(alg: &LieAlgebraSpec, t: &LieTensor) -> Result<()> {
    if t.algebra != alg.name || t.dim != alg.dim() {
        return Err(Error::AlgebraMismatch(format!("tensor over {} used with {}", t.algebra, alg.name)));
    }
    Ok(())
}

/// `[X, Y]` for order-1 tensors.
pub fn bracket(x: &LieTensor, y: &LieTensor, alg: &LieAlgebraSpec) -> Result<LieTensor> {
    check_alg(alg, x)?;
    check_alg(alg, y)?;
    if x.order != 1 || y.order != 1 {
        return Err(Error::AlgebraMismatch("bracket needs order-1 tensors".into()));
    }
    let d = alg.dim();
    let mut out = LieTensor::zero(alg, 1);
    for i in 0..d {
        let a = x.get(&[i]);
        if a.is_zero() {
            continue;
        }
        for j in 0..d {
            let b = y.get(&[j]);
            if b.is_zero() {
                continue;
            }
            let ab = a * b;
            for k in 0..d {
                let c = alg.c(i, j, k);
                if !c.is_zero() {
                    out.add_to(&[k], &(&ab * c));
                }
            }
        }
    }
    Ok(out)
}

/// `ad_X` acting on every slot: `Σ_s id⊗…⊗ad_X⊗…⊗id`.
pub fn ad_action(alg: &LieAlgebraSpec, x: usize, t: &LieTensor) -> Result<LieTensor> {
    check_alg(alg, t)?;
    let d = alg.dim();
    let mut out = LieTensor::zero(alg, t.order);
    for flat in 0..t.coeffs.len() {
        let v = &t.coeffs[flat];
        if v.is_zero() {
            continue;
        }
        let ix = t.unflatten(flat);
        for s in 0..t.order {
            for k in 0..d {
                let c = alg.c(x, ix[s], k);
                if c.is_zero() {
                    continue;
                }
                let mut jx = ix.clone();
                jx[s] = k;
                out.add_to(&jx, &(v * c));
            }
        }
    }
    Ok(out)
}

/// `[r₁₂, r₁₃] + [r₁₂, r₂₃] + [r₁₃, r₂₃]` in `𝔤^{⊗3}`.
pub fn cybe_defect(r: &LieTensor, alg: &LieAlgebraSpec) -> Result<LieTensor> {
    check_alg(alg, r)?;
    if r.order != 2 {
        return Err(Error::AlgebraMismatch("CYBE needs an order-2 tensor".into()));
    }
    let d = alg.dim();
    let nz: Vec<(usize, usize, &LambdaPoly)> = (0..d)
        .flat_map(|a| (0..d).map(move |b| (a, b)))
        .filter_map(|(a, b)| {
            let v = r.get(&[a, b]);
            (!v.is_zero()).then_some((a, b, v))
        })
        .collect();
    let mut out = LieTensor::zero(alg, 3);
    for &(a, b, rab) in &nz {
        for &(c, dd, rcd) in &nz {
            let w = rab * rcd;
            for k in 0..d {
                // [r12, r13] = Σ [e_a, e_c] ⊗ e_b ⊗ e_d
                let c1 = alg.c(a, c, k);
                if !c1.is_zero() {
                    out.add_to(&[k, b, dd], &(&w * c1));
                }
                // [r12, r23] = Σ e_a ⊗ [e_b, e_c] ⊗ e_d
                let c2 = alg.c(b, c, k);
                if !c2.is_zero() {
                    out.add_to(&[a, k, dd], &(&w * c2));
                }
                // [r13, r23] = Σ e_a ⊗ e_c ⊗ [e_b, e_d]
                let c3 = alg.c(b, dd, k);
                if !c3.is_zero() {
                    out.add_to(&[a, c, k], &(&w * c3));
                }
            }
        }
    }
    Ok(out)
}
