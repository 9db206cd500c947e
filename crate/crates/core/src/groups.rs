//! Model parameters, the pairing `beta`, the function `eta_lambda` and the
//! group laws of H, G and their extensions by one grading coordinate.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub n: usize,
    pub lambda: f64,
    pub hbar: f64,
}

impl ModelParams {
    /// Parameters usable on every path, including classical limits (`lambda = 0`).
    pub fn new(n: usize, lambda: f64, hbar: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParams("n must be at least 1".into()));
        }
        if !lambda.is_finite() || !hbar.is_finite() {
            return Err(Error::InvalidParams("lambda and hbar must be finite".into()));
        }
        Ok(Self { n, lambda, hbar })
    }

    /// Parameters for quantum-side constructions, which need `lambda != 0`.
    pub fn quantum(n: usize, lambda: f64, hbar: f64) -> Result<Self> {
        let p = Self::new(n, lambda, hbar)?;
        p.require_quantum()?;
        Ok(p)
    }

    pub fn require_quantum(&self) -> Result<()> {
        if self.lambda == 0.0 {
            return Err(Error::InvalidParams(
                "lambda must be nonzero for quantum-side constructions".into(),
            ));
        }
        Ok(())
    }

    /// `hbar * eta_lambda(r)`, the coefficient in every cocycle phase.
    pub fn heta(&self, r: f64) -> f64 {
        self.hbar * eta(self.lambda, r)
    }
}

impl Default for ModelParams {
    fn default() -> Self {
        Self { n: 1, lambda: 1.0, hbar: 1.0 }
    }
}

pub fn beta(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::Dimension { expected: x.len(), got: y.len() });
    }
    Ok(x.iter().zip(y).map(|(a, b)| a * b).sum())
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// `(e^{2λr} - 1) / 2λ`, with the `λ = 0` branch equal to `r`.
pub fn eta(lambda: f64, r: f64) -> f64 {
    if lambda == 0.0 {
        r
    } else {
        (2.0 * lambda * r).exp_m1() / (2.0 * lambda)
    }
}

/// `|e^{-2λr'}η(r+r') - e^{-2λr'}η(r') - η(r)|`.
pub fn eta_identity_defect(lambda: f64, r: f64, rp: f64) -> f64 {
    let s = (-2.0 * lambda * rp).exp();
    (s * eta(lambda, r + rp) - s * eta(lambda, rp) - eta(lambda, r)).abs()
}

/// Magnitude scale of the terms in [`eta_identity_defect`], for ulp-based bounds.
pub fn eta_identity_scale(lambda: f64, r: f64, rp: f64) -> f64 {
    let s = (-2.0 * lambda * rp).exp();
    (s * eta(lambda, r + rp)).abs() + (s * eta(lambda, rp)).abs() + eta(lambda, r).abs()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeisElement {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GElement {
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub r: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtHeisElement {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub z: f64,
    pub w: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtGElement {
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub r: f64,
    pub s: f64,
}

fn check_pair(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::Dimension { expected: a, got: b });
    }
    Ok(())
}

impl HeisElement {
    pub fn identity(n: usize) -> Self {
        Self { x: vec![0.0; n], y: vec![0.0; n], z: 0.0 }
    }
    fn check(&self) -> Result<usize> {
        check_pair(self.x.len(), self.y.len())?;
        Ok(self.x.len())
    }
}

impl GElement {
    pub fn identity(n: usize) -> Self {
        Self { p: vec![0.0; n], q: vec![0.0; n], r: 0.0 }
    }
    fn check(&self) -> Result<usize> {
        check_pair(self.p.len(), self.q.len())?;
        Ok(self.p.len())
    }
}

impl ExtHeisElement {
    pub fn identity(n: usize) -> Self {
        Self { x: vec![0.0; n], y: vec![0.0; n], z: 0.0, w: 0.0 }
    }
}

impl ExtGElement {
    pub fn identity(n: usize) -> Self {
        Self { p: vec![0.0; n], q: vec![0.0; n], r: 0.0, s: 0.0 }
    }
}

pub fn heis_mul(a: &HeisElement, b: &HeisElement) -> Result<HeisElement> {
    check_pair(a.check()?, b.check()?)?;
    Ok(HeisElement {
        x: a.x.iter().zip(&b.x).map(|(u, v)| u + v).collect(),
        y: a.y.iter().zip(&b.y).map(|(u, v)| u + v).collect(),
        z: a.z + b.z + dot(&a.x, &b.y),
    })
}

pub fn heis_inv(a: &HeisElement) -> Result<HeisElement> {
    a.check()?;
    Ok(HeisElement {
        x: a.x.iter().map(|v| -v).collect(),
        y: a.y.iter().map(|v| -v).collect(),
        z: -a.z + dot(&a.x, &a.y),
    })
}

pub fn g_mul(a: &GElement, b: &GElement, lambda: f64) -> Result<GElement> {
    check_pair(a.check()?, b.check()?)?;
    let s = (lambda * b.r).exp();
    Ok(GElement {
        p: a.p.iter().zip(&b.p).map(|(u, v)| s * u + v).collect(),
        q: a.q.iter().zip(&b.q).map(|(u, v)| s * u + v).collect(),
        r: a.r + b.r,
    })
}

/// Solves `g_mul(g, h) = identity`: `h = (-e^{-λr}p, -e^{-λr}q, -r)`.
pub fn g_inv(a: &GElement, lambda: f64) -> Result<GElement> {
    a.check()?;
    let s = (-lambda * a.r).exp();
    Ok(GElement {
        p: a.p.iter().map(|v| -s * v).collect(),
        q: a.q.iter().map(|v| -s * v).collect(),
        r: -a.r,
    })
}

pub fn ext_heis_mul(a: &ExtHeisElement, b: &ExtHeisElement) -> Result<ExtHeisElement> {
    check_pair(a.x.len(), a.y.len())?;
    check_pair(a.x.len(), b.x.len())?;
    check_pair(b.x.len(), b.y.len())?;
    let ep = a.w.exp();
    let em = (-a.w).exp();
    Ok(ExtHeisElement {
        x: a.x.iter().zip(&b.x).map(|(u, v)| u + ep * v).collect(),
        y: a.y.iter().zip(&b.y).map(|(u, v)| u + em * v).collect(),
        z: a.z + b.z + em * dot(&a.x, &b.y),
        w: a.w + b.w,
    })
}

pub fn ext_heis_inv(a: &ExtHeisElement) -> Result<ExtHeisElement> {
    check_pair(a.x.len(), a.y.len())?;
    let em = (-a.w).exp();
    let ep = a.w.exp();
    let x: Vec<f64> = a.x.iter().map(|v| -em * v).collect();
    let y: Vec<f64> = a.y.iter().map(|v| -ep * v).collect();
    // z + z' + e^{-w} β(x, y') = 0 with y' = -e^{w} y.
    Ok(ExtHeisElement { z: -a.z + dot(&a.x, &a.y), x, y, w: -a.w })
}

pub fn ext_g_mul(a: &ExtGElement, b: &ExtGElement, lambda: f64) -> Result<ExtGElement> {
    check_pair(a.p.len(), a.q.len())?;
    check_pair(a.p.len(), b.p.len())?;
    check_pair(b.p.len(), b.q.len())?;
    let s = (lambda * b.r).exp();
    Ok(ExtGElement {
        p: a.p.iter().zip(&b.p).map(|(u, v)| s * u + v).collect(),
        q: a.q.iter().zip(&b.q).map(|(u, v)| s * u + v).collect(),
        r: a.r + b.r,
        s: a.s + b.s,
    })
}

pub fn ext_g_inv(a: &ExtGElement, lambda: f64) -> Result<ExtGElement> {
    check_pair(a.p.len(), a.q.len())?;
    let s = (-lambda * a.r).exp();
    Ok(ExtGElement {
        p: a.p.iter().map(|v| -s * v).collect(),
        q: a.q.iter().map(|v| -s * v).collect(),
        r: -a.r,
        s: -a.s,
    })
}
