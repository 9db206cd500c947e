//! Real-valued expression trees over numbered coordinates.
//!
//! Substitutions, phases and log-amplitudes of every operator are written in
//! this language so that composition stays exact and descriptors serialize.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::groups::eta;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CoordExpr {
    Const { value: f64 },
    Coord { index: usize },
    Sum { terms: Vec<CoordExpr> },
    Product { factors: Vec<CoordExpr> },
    Exp { arg: Box<CoordExpr> },
    Eta { lambda: f64, arg: Box<CoordExpr> },
    /// `Σ a_i b_i`.
    Dot { a: Vec<CoordExpr>, b: Vec<CoordExpr> },
    /// `arg^power` for an integer power.
    Powi { arg: Box<CoordExpr>, power: i32 },
    /// `ln` of the bump `exp(1 − 1/(1 − (s/ρ)²))`, `−∞` outside `|s| < ρ`.
    LnBump { rho: f64, arg: Box<CoordExpr> },
}

use CoordExpr::*;

pub fn cst(value: f64) -> CoordExpr {
    Const { value }
}

pub fn coord(index: usize) -> CoordExpr {
    Coord { index }
}

pub fn exp(arg: CoordExpr) -> CoordExpr {
    match arg {
        Const { value } => cst(value.exp()),
        a => Exp { arg: Box::new(a) },
    }
}

pub fn eta_of(lambda: f64, arg: CoordExpr) -> CoordExpr {
    match arg {
        Const { value } => cst(eta(lambda, value)),
        a => Eta { lambda, arg: Box::new(a) },
    }
}

pub fn dot(a: Vec<CoordExpr>, b: Vec<CoordExpr>) -> CoordExpr {
    assert_eq!(a.len(), b.len(), "dot of unequal lengths");
    if a.len() == 1 {
        let mut a = a;
        let mut b = b;
        return a.pop().unwrap() * b.pop().unwrap();
    }
    Dot { a, b }
}

pub fn powi(arg: CoordExpr, power: i32) -> CoordExpr {
    match (arg, power) {
        (_, 0) => cst(1.0),
        (a, 1) => a,
        (Const { value }, p) => cst(value.powi(p)),
        (a, p) => Powi { arg: Box::new(a), power: p },
    }
}

pub fn ln_bump(rho: f64, arg: CoordExpr) -> CoordExpr {
    LnBump { rho, arg: Box::new(arg) }
}

pub fn sum(terms: Vec<CoordExpr>) -> CoordExpr {
    let mut out = Vec::with_capacity(terms.len());
    let mut k = 0.0;
    for t in terms {
        match t {
            Const { value } => k += value,
            Sum { terms } => {
                for s in terms {
                    match s {
                        Const { value } => k += value,
                        s => out.push(s),
                    }
                }
            }
            t => out.push(t),
        }
    }
    if k != 0.0 {
        out.push(cst(k));
    }
    match out.len() {
        0 => cst(0.0),
        1 => out.pop().unwrap(),
        _ => Sum { terms: out },
    }
}

pub fn product(factors: Vec<CoordExpr>) -> CoordExpr {
    let mut out = Vec::with_capacity(factors.len());
    let mut k = 1.0;
    for f in factors {
        match f {
            Const { value } => k *= value,
            Product { factors } => {
                for g in factors {
                    match g {
                        Const { value } => k *= value,
                        g => out.push(g),
                    }
                }
            }
            f => out.push(f),
        }
    }
    if k == 0.0 {
        return cst(0.0);
    }
    if k != 1.0 {
        out.insert(0, cst(k));
    }
    match out.len() {
        0 => cst(1.0),
        1 => out.pop().unwrap(),
        _ => Product { factors: out },
    }
}

impl CoordExpr {
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Const { value } => *value,
            Coord { index } => x[*index],
            Sum { terms } => terms.iter().map(|t| t.eval(x)).sum(),
            Product { factors } => factors.iter().map(|f| f.eval(x)).product(),
            Exp { arg } => arg.eval(x).exp(),
            Eta { lambda, arg } => eta(*lambda, arg.eval(x)),
            Dot { a, b } => a.iter().zip(b).map(|(u, v)| u.eval(x) * v.eval(x)).sum(),
            Powi { arg, power } => arg.eval(x).powi(*power),
            LnBump { rho, arg } => {
                let u = arg.eval(x) / rho;
                if u.abs() < 1.0 {
                    1.0 - 1.0 / (1.0 - u * u)
                } else {
                    f64::NEG_INFINITY
                }
            }
        }
    }

    pub fn as_const(&self) -> Option<f64> {
        match self {
            Const { value } => Some(*value),
            _ => None,
        }
    }

    /// Replaces `Coord(i)` by `with[i]`.
    pub fn substitute(&self, with: &[CoordExpr]) -> CoordExpr {
        match self {
            Const { .. } => self.clone(),
            Coord { index } => with[*index].clone(),
            Sum { terms } => sum(terms.iter().map(|t| t.substitute(with)).collect()),
            Product { factors } => product(factors.iter().map(|f| f.substitute(with)).collect()),
            Exp { arg } => exp(arg.substitute(with)),
            Eta { lambda, arg } => eta_of(*lambda, arg.substitute(with)),
            Dot { a, b } => dot(
                a.iter().map(|t| t.substitute(with)).collect(),
                b.iter().map(|t| t.substitute(with)).collect(),
            ),
            Powi { arg, power } => powi(arg.substitute(with), *power),
            LnBump { rho, arg } => ln_bump(*rho, arg.substitute(with)),
        }
    }

    /// Shifts every coordinate index through `map`.
    pub fn reindex(&self, map: &dyn Fn(usize) -> usize) -> CoordExpr {
        match self {
            Const { .. } => self.clone(),
            Coord { index } => coord(map(*index)),
            Sum { terms } => Sum { terms: terms.iter().map(|t| t.reindex(map)).collect() },
            Product { factors } => Product { factors: factors.iter().map(|t| t.reindex(map)).collect() },
            Exp { arg } => Exp { arg: Box::new(arg.reindex(map)) },
            Eta { lambda, arg } => Eta { lambda: *lambda, arg: Box::new(arg.reindex(map)) },
            Dot { a, b } => Dot {
                a: a.iter().map(|t| t.reindex(map)).collect(),
                b: b.iter().map(|t| t.reindex(map)).collect(),
            },
            Powi { arg, power } => Powi { arg: Box::new(arg.reindex(map)), power: *power },
            LnBump { rho, arg } => LnBump { rho: *rho, arg: Box::new(arg.reindex(map)) },
        }
    }

    /// Symbolic partial derivative in coordinate `i`.
    pub fn diff(&self, i: usize) -> CoordExpr {
        match self {
            Const { .. } => cst(0.0),
            Coord { index } => cst(if *index == i { 1.0 } else { 0.0 }),
            Sum { terms } => sum(terms.iter().map(|t| t.diff(i)).collect()),
            Product { factors } => sum(
                (0..factors.len())
                    .map(|k| {
                        let mut fs = factors.clone();
                        fs[k] = factors[k].diff(i);
                        product(fs)
                    })
                    .collect(),
            ),
            Exp { arg } => product(vec![self.clone(), arg.diff(i)]),
            // η_λ'(s) = e^{2λs}
            Eta { lambda, arg } => product(vec![exp(cst(2.0 * lambda) * (**arg).clone()), arg.diff(i)]),
            Dot { a, b } => sum(
                a.iter()
                    .zip(b)
                    .map(|(u, v)| u.diff(i) * v.clone() + u.clone() * v.diff(i))
                    .collect(),
            ),
            Powi { arg, power } => {
                product(vec![cst(*power as f64), powi((**arg).clone(), power - 1), arg.diff(i)])
            }
            // d/ds [1 − 1/(1 − s²/ρ²)] = −(2s/ρ²)/(1 − s²/ρ²)²
            LnBump { rho, arg } => {
                let s = (**arg).clone();
                let u2 = cst(1.0) - product(vec![cst(1.0 / (rho * rho)), s.clone(), s.clone()]);
                product(vec![cst(-2.0 / (rho * rho)), s, powi(u2, -2), arg.diff(i)])
            }
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            Const { .. } | Coord { .. } => 1,
            Sum { terms } => 1 + terms.iter().map(|t| t.node_count()).sum::<usize>(),
            Product { factors } => 1 + factors.iter().map(|t| t.node_count()).sum::<usize>(),
            Exp { arg } | Eta { arg, .. } | Powi { arg, .. } | LnBump { arg, .. } => 1 + arg.node_count(),
            Dot { a, b } => 1 + a.iter().chain(b).map(|t| t.node_count()).sum::<usize>(),
        }
    }

    /// Largest coordinate index referenced, if any.
    pub fn max_coord(&self) -> Option<usize> {
        match self {
            Const { .. } => None,
            Coord { index } => Some(*index),
            Sum { terms } => terms.iter().filter_map(|t| t.max_coord()).max(),
            Product { factors } => factors.iter().filter_map(|t| t.max_coord()).max(),
            Exp { arg } | Eta { arg, .. } | Powi { arg, .. } | LnBump { arg, .. } => arg.max_coord(),
            Dot { a, b } => a.iter().chain(b).filter_map(|t| t.max_coord()).max(),
        }
    }
}

impl Add for CoordExpr {
    type Output = CoordExpr;
    fn add(self, o: CoordExpr) -> CoordExpr {
        sum(vec![self, o])
    }
}

impl Sub for CoordExpr {
    type Output = CoordExpr;
    fn sub(self, o: CoordExpr) -> CoordExpr {
        sum(vec![self, -o])
    }
}

impl Mul for CoordExpr {
    type Output = CoordExpr;
    fn mul(self, o: CoordExpr) -> CoordExpr {
        product(vec![self, o])
    }
}

impl Neg for CoordExpr {
    type Output = CoordExpr;
    fn neg(self) -> CoordExpr {
        product(vec![cst(-1.0), self])
    }
}

impl Mul<CoordExpr> for f64 {
    type Output = CoordExpr;
    fn mul(self, o: CoordExpr) -> CoordExpr {
        product(vec![cst(self), o])
    }
}
