//! Analytic test functions: Gaussian × polynomial × plane wave in the fast
//! variables, smooth compactly supported bumps in `r` (and `w`).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::expr::{cst, ln_bump, CoordExpr};
use crate::{e, Error, Result, C64};

/// `exp(−π(t−center)²/width²)·e(wave·t)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussFactor {
    pub center: f64,
    pub width: f64,
    pub wave: f64,
}

impl GaussFactor {
    pub fn new(center: f64, width: f64, wave: f64) -> Self {
        Self { center, width, wave }
    }

    pub fn standard() -> Self {
        Self::new(0.0, 1.0, 0.0)
    }

    pub fn eval(&self, t: f64) -> C64 {
        let u = (t - self.center) / self.width;
        (-PI * u * u).exp() * e(self.wave * t)
    }

    /// `d/dt log` of the factor.
    pub fn dlog(&self, t: f64) -> C64 {
        C64::new(-2.0 * PI * (t - self.center) / (self.width * self.width), 2.0 * PI * self.wave)
    }

    /// `∫ e(t·x) factor(t) dt = s·exp(−πs²(x+k)²)·e(a(x+k))`.
    pub fn vee(&self, x: f64) -> C64 {
        let (a, s, k) = (self.center, self.width, self.wave);
        s * (-PI * s * s * (x + k) * (x + k)).exp() * e(a * (x + k))
    }

    /// `∫ ē(t·x) factor(t) dt`.
    pub fn wedge(&self, x: f64) -> C64 {
        let (a, s, k) = (self.center, self.width, self.wave);
        s * (-PI * s * s * (x - k) * (x - k)).exp() * e(-a * (x - k))
    }

    /// `vee` as `exp(log_mag)·ē[phase]` in an expression variable.
    pub fn vee_expr(&self, x: CoordExpr) -> (CoordExpr, CoordExpr) {
        let (a, s, k) = (self.center, self.width, self.wave);
        let xk = x + cst(k);
        let log_mag = cst(s.ln()) + (-PI * s * s) * (xk.clone() * xk.clone());
        (log_mag, -a * xk)
    }

    pub fn integral(&self) -> C64 {
        self.wedge(0.0)
    }
}

/// `exp(1 − 1/(1 − ((t−center)/rho)²))` on `|t−center| < rho`, zero outside.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub center: f64,
    pub rho: f64,
}

impl Bump {
    pub fn new(center: f64, rho: f64) -> Self {
        Self { center, rho }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let u = (t - self.center) / self.rho;
        if u.abs() < 1.0 {
            (1.0 - 1.0 / (1.0 - u * u)).exp()
        } else {
            0.0
        }
    }

    pub fn deriv(&self, t: f64) -> f64 {
        let u = (t - self.center) / self.rho;
        if u.abs() < 1.0 {
            let d = 1.0 - u * u;
            self.eval(t) * (-2.0 * u / (self.rho * d * d))
        } else {
            0.0
        }
    }

    pub fn ln_expr(&self, t: CoordExpr) -> CoordExpr {
        ln_bump(self.rho, t - cst(self.center))
    }

    pub fn support(&self) -> (f64, f64) {
        (self.center - self.rho, self.center + self.rho)
    }

    /// `∫ bump`, by composite Simpson on the support.
    pub fn integral(&self) -> f64 {
        let m = 4000;
        let (lo, hi) = self.support();
        let h = (hi - lo) / m as f64;
        let mut s = 0.0;
        for i in 0..=m {
            let w = if i == 0 || i == m { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * self.eval(lo + i as f64 * h);
        }
        s * h / 3.0
    }
}

/// `Σ coeff · Π p_i^{a_i} q_i^{b_i}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Monomial {
    pub coeff: C64,
    pub p_powers: Vec<u32>,
    pub q_powers: Vec<u32>,
}

/// A function of `(p, q, r)` or `(p, q, r, w)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormFunction {
    pub p: Vec<GaussFactor>,
    pub q: Vec<GaussFactor>,
    /// Empty means the constant polynomial 1.
    pub poly: Vec<Monomial>,
    pub r_bump: Bump,
    pub w_bump: Option<Bump>,
    pub scale: C64,
}

impl ClosedFormFunction {
    pub fn gaussian(p: Vec<GaussFactor>, q: Vec<GaussFactor>, r_bump: Bump) -> Self {
        assert_eq!(p.len(), q.len());
        Self { p, q, poly: Vec::new(), r_bump, w_bump: None, scale: C64::new(1.0, 0.0) }
    }

    /// n = 1 shorthand: `(a, b, s1, s2, k1, k2)` = centers, widths, waves.
    pub fn gaussian1(c: [f64; 6], r_bump: Bump) -> Self {
        Self::gaussian(vec![GaussFactor::new(c[0], c[2], c[4])], vec![GaussFactor::new(c[1], c[3], c[5])], r_bump)
    }

    pub fn with_w_bump(mut self, b: Bump) -> Self {
        self.w_bump = Some(b);
        self
    }

    pub fn with_poly(mut self, poly: Vec<Monomial>) -> Self {
        self.poly = poly;
        self
    }

    pub fn scaled(mut self, s: C64) -> Self {
        self.scale *= s;
        self
    }

    pub fn n(&self) -> usize {
        self.p.len()
    }

    pub fn is_extended(&self) -> bool {
        self.w_bump.is_some()
    }

    fn poly_eval(&self, p: &[f64], q: &[f64]) -> C64 {
        if self.poly.is_empty() {
            return C64::new(1.0, 0.0);
        }
        self.poly
            .iter()
            .map(|m| {
                let mut v = m.coeff;
                for i in 0..p.len() {
                    v *= p[i].powi(m.p_powers[i] as i32) * q[i].powi(m.q_powers[i] as i32);
                }
                v
            })
            .sum()
    }

    /// Value at `(p, q, r)`; `w` is used only when a `w` bump is present.
    pub fn eval(&self, p: &[f64], q: &[f64], r: f64, w: f64) -> C64 {
        let b = self.r_bump.eval(r) * self.w_bump.map_or(1.0, |wb| wb.eval(w));
        if b == 0.0 {
            return C64::new(0.0, 0.0);
        }
        let mut v = self.scale * b;
        for i in 0..self.n() {
            v *= self.p[i].eval(p[i]) * self.q[i].eval(q[i]);
        }
        v * self.poly_eval(p, q)
    }

    /// `∂/∂p_i` and `∂/∂q_i` (Gaussian factors only).
    pub fn grad_pq(&self, p: &[f64], q: &[f64], r: f64, w: f64) -> Result<(Vec<C64>, Vec<C64>)> {
        if !self.poly.is_empty() {
            return Err(Error::Unsupported("analytic gradient with polynomial factor".into()));
        }
        let v = self.eval(p, q, r, w);
        Ok((
            (0..self.n()).map(|i| v * self.p[i].dlog(p[i])).collect(),
            (0..self.n()).map(|i| v * self.q[i].dlog(q[i])).collect(),
        ))
    }

    fn require_plain_gaussian(&self) -> Result<()> {
        if !self.poly.is_empty() {
            return Err(Error::Unsupported("closed-form transform with polynomial factor".into()));
        }
        Ok(())
    }

    /// `φ^∨(x, y, r) = ∫ e(p·x + q·y) φ(p, q, r) dp dq`.
    pub fn vee(&self, x: &[f64], y: &[f64], r: f64, w: f64) -> Result<C64> {
        self.require_plain_gaussian()?;
        let b = self.r_bump.eval(r) * self.w_bump.map_or(1.0, |wb| wb.eval(w));
        let mut v = self.scale * b;
        for i in 0..self.n() {
            v *= self.p[i].vee(x[i]) * self.q[i].vee(y[i]);
        }
        Ok(v)
    }

    /// `φ^∨` as `(log_mag, phase)` with value `exp(log_mag)·ē[phase]`.
    pub fn log_vee_expr(&self, x: &[CoordExpr], y: &[CoordExpr], r: CoordExpr) -> Result<(CoordExpr, CoordExpr)> {
        self.require_plain_gaussian()?;
        if self.is_extended() {
            return Err(Error::Unsupported("log_vee_expr on an extended-picture function".into()));
        }
        let mut lm = cst(self.scale.norm().ln()) + self.r_bump.ln_expr(r);
        let mut ph = cst(-self.scale.arg() / (2.0 * PI));
        for i in 0..self.n() {
            let (a, b) = self.p[i].vee_expr(x[i].clone());
            let (c, d) = self.q[i].vee_expr(y[i].clone());
            lm = lm + a + c;
            ph = ph + b + d;
        }
        Ok((lm, ph))
    }

    /// The function itself as `(log_mag, phase)`, read in whatever picture its
    /// arguments live in.
    pub fn log_expr(&self, p: &[CoordExpr], q: &[CoordExpr], r: CoordExpr) -> Result<(CoordExpr, CoordExpr)> {
        self.require_plain_gaussian()?;
        if self.is_extended() {
            return Err(Error::Unsupported("log_expr on an extended-picture function".into()));
        }
        let mut lm = cst(self.scale.norm().ln()) + self.r_bump.ln_expr(r);
        let mut ph = cst(-self.scale.arg() / (2.0 * PI));
        for (g, t) in self.p.iter().zip(p).chain(self.q.iter().zip(q)) {
            let u = t.clone() - cst(g.center);
            lm = lm + (-PI / (g.width * g.width)) * (u.clone() * u);
            ph = ph + (-g.wave) * t.clone();
        }
        Ok((lm, ph))
    }

    /// `∫ φ dp dq dr (dw)`.
    pub fn integral(&self) -> Result<C64> {
        self.require_plain_gaussian()?;
        let mut v = self.scale * self.r_bump.integral() * self.w_bump.map_or(1.0, |b| b.integral());
        for i in 0..self.n() {
            v *= self.p[i].integral() * self.q[i].integral();
        }
        Ok(v)
    }

    /// `φ†(p,q,r) = conj φ(−e^{−λr}p, −e^{−λr}q, −r)`.
    pub fn dagger_eval(&self, p: &[f64], q: &[f64], r: f64, lambda: f64) -> C64 {
        let s = -(-lambda * r).exp();
        let pp: Vec<f64> = p.iter().map(|v| s * v).collect();
        let qq: Vec<f64> = q.iter().map(|v| s * v).collect();
        self.eval(&pp, &qq, -r, 0.0).conj()
    }

    /// `(φ†)^∨` as `(log_mag, phase)`: `e^{2nλr}·conj φ^∨(e^{λr}x, e^{λr}y, −r)`.
    pub fn log_dagger_vee_expr(
        &self,
        x: &[CoordExpr],
        y: &[CoordExpr],
        r: CoordExpr,
        lambda: f64,
    ) -> Result<(CoordExpr, CoordExpr)> {
        let er = crate::expr::exp(lambda * r.clone());
        let xs: Vec<CoordExpr> = x.iter().map(|v| er.clone() * v.clone()).collect();
        let ys: Vec<CoordExpr> = y.iter().map(|v| er.clone() * v.clone()).collect();
        let (lm, ph) = self.log_vee_expr(&xs, &ys, -r.clone())?;
        Ok(((2.0 * self.n() as f64 * lambda) * r + lm, -ph))
    }
}

/// A product `F = F₁ ⊗ F₂` of two extended-picture functions on `(p,q,r,w)²`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoLegFunction {
    pub first: ClosedFormFunction,
    pub second: ClosedFormFunction,
}

/// Point of `(p,q,r,w,p′,q′,r′,w′)` for n = 1.
pub type Point8 = [f64; 8];

impl TwoLegFunction {
    pub fn eval(&self, x: &Point8) -> C64 {
        self.first.eval(&[x[0]], &[x[1]], x[2], x[3]) * self.second.eval(&[x[4]], &[x[5]], x[6], x[7])
    }

    /// `(F_p, F_q, F_p′, F_q′)`.
    pub fn grad_fast(&self, x: &Point8) -> Result<[C64; 4]> {
        let (g1p, g1q) = self.first.grad_pq(&[x[0]], &[x[1]], x[2], x[3])?;
        let (g2p, g2q) = self.second.grad_pq(&[x[4]], &[x[5]], x[6], x[7])?;
        let f1 = self.first.eval(&[x[0]], &[x[1]], x[2], x[3]);
        let f2 = self.second.eval(&[x[4]], &[x[5]], x[6], x[7]);
        Ok([g1p[0] * f2, g1q[0] * f2, f1 * g2p[0], f1 * g2q[0]])
    }

    /// Exact `∫|F|` is not closed-form; this is `∫|F|²`-free support box for sampling.
    pub fn support_box(&self, fast_half_width: f64) -> [(f64, f64); 8] {
        let fb = |g: &GaussFactor| (g.center - fast_half_width * g.width, g.center + fast_half_width * g.width);
        let wb = |f: &ClosedFormFunction| f.w_bump.map_or((-1.0, 1.0), |b| b.support());
        [
            fb(&self.first.p[0]),
            fb(&self.first.q[0]),
            self.first.r_bump.support(),
            wb(&self.first),
            fb(&self.second.p[0]),
            fb(&self.second.q[0]),
            self.second.r_bump.support(),
            wb(&self.second),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::coord;

    #[test]
    fn vee_against_quadrature() {
        let g = GaussFactor::new(0.3, 1.1, -0.2);
        for &x in &[-0.7, 0.0, 0.45] {
            let h = 1e-3;
            let mut s = C64::new(0.0, 0.0);
            let mut t = -12.0;
            while t < 12.0 {
                s += g.eval(t) * e(t * x) * h;
                t += h;
            }
            assert!((s - g.vee(x)).norm() < 1e-10, "{x}");
        }
    }

    #[test]
    fn expr_matches_eval() {
        let f = ClosedFormFunction::gaussian1([0.1, -0.05, 1.2, 1.25, 0.1, -0.05], Bump::new(0.0, 0.5)).scaled(C64::new(0.3, -0.7));
        let (lm, ph) = f.log_vee_expr(&[coord(0)], &[coord(1)], coord(2)).unwrap();
        let x = [0.2, -0.3, 0.17];
        let v = lm.eval(&x).exp() * crate::ebar(ph.eval(&x));
        assert!((v - f.vee(&[0.2], &[-0.3], 0.17, 0.0).unwrap()).norm() < 1e-14);
        let (lm, ph) = f.log_dagger_vee_expr(&[coord(0)], &[coord(1)], coord(2), 0.8).unwrap();
        let v = lm.eval(&x).exp() * crate::ebar(ph.eval(&x));
        let er = (0.8f64 * 0.17).exp();
        let want = (1.6f64 * 0.17).exp() * f.vee(&[er * 0.2], &[er * -0.3], -0.17, 0.0).unwrap().conj();
        assert!((v - want).norm() < 1e-14);
    }

    #[test]
    fn bump_values() {
        let b = Bump::new(1.0, 0.5);
        assert_eq!(b.eval(1.0), 1.0);
        assert_eq!(b.eval(1.6), 0.0);
        let h = 1e-6;
        assert!((b.deriv(1.2) - (b.eval(1.2 + h) - b.eval(1.2 - h)) / (2.0 * h)).abs() < 1e-7);
        assert!(b.integral() > 0.0 && b.integral() < 1.0);
    }

    #[test]
    fn gradient_matches_fd() {
        let f = ClosedFormFunction::gaussian1([0.1, -0.05, 1.2, 1.25, 0.1, -0.05], Bump::new(0.0, 0.5));
        let (gp, gq) = f.grad_pq(&[0.3], &[0.2], 0.1, 0.0).unwrap();
        let h = 1e-6;
        let fd = (f.eval(&[0.3 + h], &[0.2], 0.1, 0.0) - f.eval(&[0.3 - h], &[0.2], 0.1, 0.0)) / (2.0 * h);
        assert!((gp[0] - fd).norm() < 1e-8);
        let fd = (f.eval(&[0.3], &[0.2 + h], 0.1, 0.0) - f.eval(&[0.3], &[0.2 - h], 0.1, 0.0)) / (2.0 * h);
        assert!((gq[0] - fd).norm() < 1e-8);
    }
}
