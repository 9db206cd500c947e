//! Polynomials in the formal deformation constant λ with exact rational
//! coefficients.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// `Σ_k c_k λ^k`; `coeffs[k] = c_k`, trailing zeros trimmed.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct LambdaPoly {
    coeffs: Vec<BigRational>,
}

pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

impl LambdaPoly {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: BigRational) -> Self {
        Self::from_coeffs(vec![c])
    }

    pub fn int(c: i64) -> Self {
        Self::constant(rat(c, 1))
    }

    /// `c · λ`.
    pub fn lambda_times(c: BigRational) -> Self {
        Self::from_coeffs(vec![BigRational::zero(), c])
    }

    pub fn from_coeffs(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, k: usize) -> BigRational {
        self.coeffs.get(k).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn eval(&self, lambda: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * lambda + c;
        }
        acc
    }

    pub fn eval_f64(&self, lambda: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * lambda + c.to_f64().unwrap_or(f64::NAN))
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// Pairs `(numerator, denominator)` as decimal strings, one per power of λ.
    pub fn to_pairs(&self) -> Vec<[String; 2]> {
        self.coeffs
            .iter()
            .map(|c| [c.numer().to_string(), c.denom().to_string()])
            .collect()
    }

    pub fn from_pairs(pairs: &[[String; 2]]) -> Option<Self> {
        let mut coeffs = Vec::with_capacity(pairs.len());
        for [n, d] in pairs {
            let n: BigInt = n.parse().ok()?;
            let d: BigInt = d.parse().ok()?;
            if d.is_zero() {
                return None;
            }
            coeffs.push(BigRational::new(n, d));
        }
        Some(Self::from_coeffs(coeffs))
    }
}

impl Add for &LambdaPoly {
    type Output = LambdaPoly;
    fn add(self, o: &LambdaPoly) -> LambdaPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        LambdaPoly::from_coeffs((0..n).map(|k| self.coeff(k) + o.coeff(k)).collect())
    }
}

impl Sub for &LambdaPoly {
    type Output = LambdaPoly;
    fn sub(self, o: &LambdaPoly) -> LambdaPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        LambdaPoly::from_coeffs((0..n).map(|k| self.coeff(k) - o.coeff(k)).collect())
    }
}

impl Mul for &LambdaPoly {
    type Output = LambdaPoly;
    fn mul(self, o: &LambdaPoly) -> LambdaPoly {
        if self.is_zero() || o.is_zero() {
            return LambdaPoly::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        LambdaPoly::from_coeffs(out)
    }
}

impl Neg for &LambdaPoly {
    type Output = LambdaPoly;
    fn neg(self) -> LambdaPoly {
        LambdaPoly::from_coeffs(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl fmt::Display for LambdaPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " {} ", if c.is_negative() { '-' } else { '+' })?;
            } else if c.is_negative() {
                write!(f, "-")?;
            }
            first = false;
            let a = c.abs();
            match k {
                0 => write!(f, "{a}")?,
                _ if a.is_one() => {}
                _ => write!(f, "{a}·")?,
            }
            match k {
                0 => {}
                1 => write!(f, "λ")?,
                _ => write!(f, "λ^{k}")?,
            }
        }
        Ok(())
    }
}

/// Serialized form of a polynomial coefficient.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolyJson(pub Vec<[String; 2]>);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic() {
        let a = LambdaPoly::from_coeffs(vec![rat(1, 2), rat(2, 1)]);
        let b = LambdaPoly::lambda_times(rat(-2, 1));
        assert_eq!(&a + &b, LambdaPoly::constant(rat(1, 2)));
        let p = &a * &a;
        assert_eq!(p.coeffs(), &[rat(1, 4), rat(2, 1), rat(4, 1)]);
        assert_eq!(p.eval(&rat(1, 2)), rat(9, 4));
        assert!((&p - &p).is_zero());
        assert_eq!(format!("{}", a), "1/2 + 2·λ");
    }

    #[test]
    fn pairs_roundtrip() {
        let a = LambdaPoly::from_coeffs(vec![rat(-3, 7), rat(0, 1), rat(5, 2)]);
        assert_eq!(LambdaPoly::from_pairs(&a.to_pairs()).unwrap(), a);
    }
}
