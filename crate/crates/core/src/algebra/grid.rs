//! Origin-centred grids for n = 1 and functions sampled on them.

use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::closed_form::ClosedFormFunction;
use crate::{Error, Result, C64};

/// One axis: `points` samples at `−half_width + k·Δ`, `Δ = 2·half_width/points`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub half_width: f64,
    pub points: usize,
}

impl Axis {
    pub fn new(half_width: f64, points: usize) -> Result<Self> {
        if !(points >= 4 && points.is_power_of_two()) {
            return Err(Error::Grid(format!("axis point count {points} is not a power of two >= 4")));
        }
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::Grid(format!("axis half-width {half_width} must be positive")));
        }
        Ok(Self { half_width, points })
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.points as f64
    }

    pub fn coord(&self, k: usize) -> f64 {
        -self.half_width + k as f64 * self.spacing()
    }

    pub fn coords(&self) -> Vec<f64> {
        (0..self.points).map(|k| self.coord(k)).collect()
    }

    /// The discrete Fourier dual: spacing `1/(NΔ)`.
    pub fn dual(&self) -> Self {
        Self { half_width: 0.5 / self.spacing(), points: self.points }
    }

    /// Index of the origin.
    pub fn origin(&self) -> usize {
        self.points / 2
    }
}

/// Which variables the samples are functions of.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Picture {
    /// `(p, q, r)`: the function algebra side.
    Pqr,
    /// `(x, y, r)`: after the partial transform in the fast variables.
    Xyr,
    /// `(x, y, z)`: after the full transform.
    Xyz,
}

/// A grid described in the `(p, q, r)` picture; the other pictures use dual axes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    /// Shared by `p` and `q`.
    pub fast: Axis,
    pub r: Axis,
}

impl Grid {
    pub fn new(fast: Axis, r: Axis) -> Self {
        Self { fast, r }
    }

    /// Fast axis with `Δp = 1/√N` so that it is its own dual.
    pub fn self_dual(points: usize, r_half_width: f64, r_points: usize) -> Result<Self> {
        let half = 0.5 * (points as f64).sqrt();
        Ok(Self { fast: Axis::new(half, points)?, r: Axis::new(r_half_width, r_points)? })
    }

    pub fn fast_axis(&self, picture: Picture) -> Axis {
        match picture {
            Picture::Pqr => self.fast,
            Picture::Xyr | Picture::Xyz => self.fast.dual(),
        }
    }

    pub fn slow_axis(&self, picture: Picture) -> Axis {
        match picture {
            Picture::Pqr | Picture::Xyr => self.r,
            Picture::Xyz => self.r.dual(),
        }
    }

    pub fn len(&self) -> usize {
        self.fast.points * self.fast.points * self.r.points
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Volume element of one sample.
    pub fn cell(&self, picture: Picture) -> f64 {
        let f = self.fast_axis(picture).spacing();
        f * f * self.slow_axis(picture).spacing()
    }
}

/// Samples stored slice-major: `data[(k·N + i)·N + j]` is the value at
/// `(u_i, v_j, s_k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledFunction {
    pub grid: Grid,
    pub picture: Picture,
    pub data: Vec<C64>,
}

impl SampledFunction {
    pub fn zeros(grid: Grid, picture: Picture) -> Self {
        Self { grid, picture, data: vec![C64::new(0.0, 0.0); grid.len()] }
    }

    pub fn from_fn<F>(grid: Grid, picture: Picture, f: F) -> Self
    where
        F: Fn(f64, f64, f64) -> C64 + Sync,
    {
        let fa = grid.fast_axis(picture);
        let sa = grid.slow_axis(picture);
        let n = fa.points;
        let u = fa.coords();
        let mut data = vec![C64::new(0.0, 0.0); grid.len()];
        data.par_chunks_mut(n * n).enumerate().for_each(|(k, slice)| {
            let s = sa.coord(k);
            for i in 0..n {
                for j in 0..n {
                    slice[i * n + j] = f(u[i], u[j], s);
                }
            }
        });
        Self { grid, picture, data }
    }

    /// Samples `φ(p, q, r)` of a one-leg closed form.
    pub fn sample(grid: Grid, phi: &ClosedFormFunction) -> Result<Self> {
        if phi.n() != 1 || phi.is_extended() {
            return Err(Error::Grid("grids realise n = 1 non-extended functions only".into()));
        }
        Ok(Self::from_fn(grid, Picture::Pqr, |p, q, r| phi.eval(&[p], &[q], r, 0.0)))
    }

    /// Samples `φ^∨(x, y, r)` of a one-leg closed form.
    pub fn sample_vee(grid: Grid, phi: &ClosedFormFunction) -> Result<Self> {
        if phi.n() != 1 || phi.is_extended() {
            return Err(Error::Grid("grids realise n = 1 non-extended functions only".into()));
        }
        phi.vee(&[0.0], &[0.0], 0.0, 0.0)?;
        Ok(Self::from_fn(grid, Picture::Xyr, |x, y, r| phi.vee(&[x], &[y], r, 0.0).unwrap()))
    }

    pub fn n_fast(&self) -> usize {
        self.grid.fast.points
    }

    pub fn n_slow(&self) -> usize {
        self.grid.r.points
    }

    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        let n = self.n_fast();
        (k * n + i) * n + j
    }

    pub fn at(&self, i: usize, j: usize, k: usize) -> C64 {
        self.data[self.index(i, j, k)]
    }

    pub fn slice(&self, k: usize) -> &[C64] {
        let m = self.n_fast() * self.n_fast();
        &self.data[k * m..(k + 1) * m]
    }

    pub fn slice_is_zero(&self, k: usize) -> bool {
        self.slice(k).iter().all(|v| v.re == 0.0 && v.im == 0.0)
    }

    pub fn require_compatible(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::Grid("grids differ".into()));
        }
        if self.picture != other.picture {
            return Err(Error::Grid(format!("pictures differ: {:?} vs {:?}", self.picture, other.picture)));
        }
        Ok(())
    }

    pub fn require_picture(&self, picture: Picture) -> Result<()> {
        if self.picture != picture {
            return Err(Error::Grid(format!("expected {picture:?} picture, got {:?}", self.picture)));
        }
        Ok(())
    }

    pub fn map<F: Fn(C64) -> C64 + Sync>(&self, f: F) -> Self {
        Self { grid: self.grid, picture: self.picture, data: self.data.par_iter().map(|&v| f(v)).collect() }
    }

    pub fn zip_with<F: Fn(C64, C64) -> C64 + Sync>(&self, other: &Self, f: F) -> Result<Self> {
        self.require_compatible(other)?;
        let data = self.data.par_iter().zip(other.data.par_iter()).map(|(&a, &b)| f(a, b)).collect();
        Ok(Self { grid: self.grid, picture: self.picture, data })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, s: C64) -> Self {
        self.map(|v| v * s)
    }

    /// Sum of `g(v)` in a fixed order, per slice then across slices.
    fn ordered_sum<G: Fn(C64) -> f64 + Sync>(&self, g: G) -> f64 {
        let m = self.n_fast() * self.n_fast();
        let partial: Vec<f64> = self.data.par_chunks(m).map(|s| s.iter().map(|&v| g(v)).sum()).collect();
        partial.iter().sum()
    }

    pub fn sum(&self) -> C64 {
        let m = self.n_fast() * self.n_fast();
        let partial: Vec<C64> = self.data.par_chunks(m).map(|s| s.iter().sum()).collect();
        partial.iter().sum()
    }

    pub fn norm_l1(&self) -> f64 {
        self.ordered_sum(|v| v.norm()) * self.grid.cell(self.picture)
    }

    pub fn norm_l2(&self) -> f64 {
        (self.ordered_sum(|v| v.norm_sqr()) * self.grid.cell(self.picture)).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    /// `‖self − other‖₂ / ‖other‖₂`.
    pub fn rel_l2(&self, other: &Self) -> Result<f64> {
        let d = self.sub(other)?.norm_l2();
        let r = other.norm_l2();
        Ok(if r == 0.0 { d } else { d / r })
    }

    /// Largest modulus on the outer faces of the box over the peak modulus.
    pub fn boundary_ratio(&self) -> f64 {
        let (n, ns) = (self.n_fast(), self.n_slow());
        let peak = self.max_abs();
        if peak == 0.0 {
            return 0.0;
        }
        let mut b: f64 = 0.0;
        for k in 0..ns {
            for i in 0..n {
                for j in 0..n {
                    if i == 0 || j == 0 || i == n - 1 || j == n - 1 || k == 0 || k == ns - 1 {
                        b = b.max(self.at(i, j, k).norm());
                    }
                }
            }
        }
        b / peak
    }

    /// JSON header line, then little-endian `f32` real/imaginary pairs in
    /// row-major `(u, v, s)` order.
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        let header = BinaryHeader { grid: self.grid, picture: self.picture, order: "row-major (u,v,s)".into() };
        let mut line = serde_json::to_string(&header)?;
        line.push('\n');
        w.write_all(line.as_bytes())?;
        let (n, ns) = (self.n_fast(), self.n_slow());
        let mut buf = Vec::with_capacity(self.data.len() * 8);
        for i in 0..n {
            for j in 0..n {
                for k in 0..ns {
                    let v = self.at(i, j, k);
                    buf.extend_from_slice(&(v.re as f32).to_le_bytes());
                    buf.extend_from_slice(&(v.im as f32).to_le_bytes());
                }
            }
        }
        w.write_all(&buf)?;
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<Self> {
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes)?;
        let nl = bytes
            .iter()
            .position(|&b| b == b'\n')
            .ok_or_else(|| Error::Grid("missing header line".into()))?;
        let header: BinaryHeader = serde_json::from_slice(&bytes[..nl])?;
        let body = &bytes[nl + 1..];
        let grid = header.grid;
        if body.len() != grid.len() * 8 {
            return Err(Error::Grid(format!("expected {} sample bytes, found {}", grid.len() * 8, body.len())));
        }
        let mut f = Self::zeros(grid, header.picture);
        let (n, ns) = (f.n_fast(), f.n_slow());
        let mut it = body.chunks_exact(4).map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64);
        for i in 0..n {
            for j in 0..n {
                for k in 0..ns {
                    let re = it.next().unwrap();
                    let im = it.next().unwrap();
                    let idx = f.index(i, j, k);
                    f.data[idx] = C64::new(re, im);
                }
            }
        }
        Ok(f)
    }
}

#[derive(Serialize, Deserialize)]
struct BinaryHeader {
    grid: Grid,
    picture: Picture,
    order: String,
}
