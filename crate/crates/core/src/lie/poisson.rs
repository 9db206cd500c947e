//! The Poisson bracket on the dual group and finite-difference gradients.

use crate::groups::{beta, eta, GElement};
use crate::{ModelParams, Result, C64};

/// Central-difference step for black-box gradients.
pub const FD_STEP: f64 = 1e-5;

/// `(∂φ/∂p, ∂φ/∂q, ∂φ/∂r)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Gradient {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub z: f64,
}

pub trait SmoothFunctional: Sync {
    fn eval(&self, pt: &GElement) -> f64;

    fn analytic_gradient(&self, _pt: &GElement) -> Option<Gradient> {
        None
    }

    fn gradient(&self, pt: &GElement) -> Gradient {
        self.analytic_gradient(pt).unwrap_or_else(|| fd_gradient(self, pt, FD_STEP))
    }
}

impl<F: Fn(&GElement) -> f64 + Sync> SmoothFunctional for F {
    fn eval(&self, pt: &GElement) -> f64 {
        self(pt)
    }
}

pub fn fd_gradient<F: SmoothFunctional + ?Sized>(f: &F, pt: &GElement, h: f64) -> Gradient {
    let n = pt.p.len();
    let diff = |shift: &dyn Fn(&mut GElement, f64)| {
        let mut a = pt.clone();
        let mut b = pt.clone();
        shift(&mut a, h);
        shift(&mut b, -h);
        (f.eval(&a) - f.eval(&b)) / (2.0 * h)
    };
    let x = (0..n).map(|i| diff(&|g: &mut GElement, s| g.p[i] += s)).collect();
    let y = (0..n).map(|i| diff(&|g: &mut GElement, s| g.q[i] += s)).collect();
    let z = diff(&|g: &mut GElement, s| g.r += s);
    Gradient { x, y, z }
}

/// `{φ,ψ}(p,q,r) = η_λ(r)(β(x,y′) − β(x′,y))`, `(x,y,z)=dφ`, `(x′,y′,z′)=dψ`.
pub fn poisson_bracket<A, B>(phi: &A, psi: &B, pt: &GElement, params: &ModelParams) -> Result<f64>
where
    A: SmoothFunctional + ?Sized,
    B: SmoothFunctional + ?Sized,
{
    let d1 = phi.gradient(pt);
    let d2 = psi.gradient(pt);
    Ok(eta(params.lambda, pt.r) * (beta(&d1.x, &d2.y)? - beta(&d2.x, &d1.y)?))
}

/// The same bracket for complex functions from their `(∂_p, ∂_q)` gradients.
pub fn bracket_from_gradients(lambda: f64, r: f64, dphi: (&[C64], &[C64]), dpsi: (&[C64], &[C64])) -> C64 {
    let pair = |a: &[C64], b: &[C64]| a.iter().zip(b).map(|(u, v)| u * v).sum::<C64>();
    eta(lambda, r) * (pair(dphi.0, dpsi.1) - pair(dpsi.0, dphi.1))
}

/// `{φ,ψ}` as a functional in its own right.
pub struct BracketFunctional<'a> {
    pub phi: &'a dyn SmoothFunctional,
    pub psi: &'a dyn SmoothFunctional,
    pub params: ModelParams,
}

impl SmoothFunctional for BracketFunctional<'_> {
    fn eval(&self, pt: &GElement) -> f64 {
        poisson_bracket(self.phi, self.psi, pt, &self.params).unwrap_or(f64::NAN)
    }
}

/// `|{{φ,ψ},χ} + {{ψ,χ},φ} + {{χ,φ},ψ}|` with nested central differences.
pub fn jacobi_defect(
    phi: &dyn SmoothFunctional,
    psi: &dyn SmoothFunctional,
    chi: &dyn SmoothFunctional,
    pt: &GElement,
    params: &ModelParams,
) -> Result<f64> {
    let ab = BracketFunctional { phi, psi, params: *params };
    let bc = BracketFunctional { phi: psi, psi: chi, params: *params };
    let ca = BracketFunctional { phi: chi, psi: phi, params: *params };
    let s = poisson_bracket(&ab, chi, pt, params)?
        + poisson_bracket(&bc, phi, pt, params)?
        + poisson_bracket(&ca, psi, pt, params)?;
    Ok(s.abs())
}
