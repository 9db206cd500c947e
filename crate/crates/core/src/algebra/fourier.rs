//! Centred discrete Fourier transforms with the `e(t) = exp(2πit)` convention.
//!
//! On an axis with `N ≡ 0 mod 4` points `u_j = −L + jΔ` and dual points
//! `k_m = −L̂ + m/(NΔ)`, `ē(k_m u_j) = (−1)^{m+j} exp(−2πi jm/N)`, so each
//! transform is one FFT between two sign modulations.

use std::sync::Arc;

use rayon::prelude::*;
use rustfft::{Fft, FftDirection, FftPlanner};

use super::closed_form::ClosedFormFunction;
use super::grid::{Picture, SampledFunction};
use crate::{e, Error, Result, C64};

/// `ē` kernel (forward) or `e` kernel (inverse).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kernel {
    EBar,
    E,
}

fn plan(n: usize, kernel: Kernel) -> Arc<dyn Fft<f64>> {
    let dir = match kernel {
        Kernel::EBar => FftDirection::Forward,
        Kernel::E => FftDirection::Inverse,
    };
    FftPlanner::new().plan_fft(n, dir)
}

fn sign(j: usize) -> f64 {
    if j.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Centred transform of one line in place; `delta` is the input spacing.
fn line_transform(buf: &mut [C64], fft: &dyn Fft<f64>, scratch: &mut [C64], delta: f64) {
    for (j, v) in buf.iter_mut().enumerate() {
        *v *= sign(j);
    }
    fft.process_with_scratch(buf, scratch);
    for (m, v) in buf.iter_mut().enumerate() {
        *v *= sign(m) * delta;
    }
}

/// Transforms along one axis of the slice-major layout: 0 = `u`, 1 = `v`, 2 = `s`.
fn transform_axis(data: &mut [C64], n: usize, ns: usize, axis: usize, kernel: Kernel, delta: f64) {
    match axis {
        1 => {
            let fft = plan(n, kernel);
            data.par_chunks_mut(n).for_each_init(
                || vec![C64::new(0.0, 0.0); fft.get_inplace_scratch_len()],
                |scratch, line| line_transform(line, fft.as_ref(), scratch, delta),
            );
        }
        0 => {
            let fft = plan(n, kernel);
            data.par_chunks_mut(n * n).for_each(|slice| {
                let mut scratch = vec![C64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
                let mut line = vec![C64::new(0.0, 0.0); n];
                for j in 0..n {
                    for i in 0..n {
                        line[i] = slice[i * n + j];
                    }
                    line_transform(&mut line, fft.as_ref(), &mut scratch, delta);
                    for i in 0..n {
                        slice[i * n + j] = line[i];
                    }
                }
            });
        }
        _ => {
            let fft = plan(ns, kernel);
            let m = n * n;
            let columns: Vec<Vec<C64>> = (0..m)
                .into_par_iter()
                .map(|c| {
                    let mut scratch = vec![C64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
                    let mut line: Vec<C64> = (0..ns).map(|k| data[k * m + c]).collect();
                    line_transform(&mut line, fft.as_ref(), &mut scratch, delta);
                    line
                })
                .collect();
            for (c, line) in columns.iter().enumerate() {
                for k in 0..ns {
                    data[k * m + c] = line[k];
                }
            }
        }
    }
}

fn fast_transform(f: &SampledFunction, kernel: Kernel, to: Picture) -> SampledFunction {
    let mut out = f.clone();
    let delta = f.grid.fast_axis(f.picture).spacing();
    let (n, ns) = (f.n_fast(), f.n_slow());
    transform_axis(&mut out.data, n, ns, 0, kernel, delta);
    transform_axis(&mut out.data, n, ns, 1, kernel, delta);
    out.picture = to;
    out
}

/// `f^∧(p,q,r) = ∫ ē(px + qy) f(x,y,r) dx dy`.
pub fn wedge(f: &SampledFunction) -> Result<SampledFunction> {
    f.require_picture(Picture::Xyr)?;
    Ok(fast_transform(f, Kernel::EBar, Picture::Pqr))
}

/// `φ^∨(x,y,r) = ∫ e(px + qy) φ(p,q,r) dp dq`.
pub fn vee(phi: &SampledFunction) -> Result<SampledFunction> {
    phi.require_picture(Picture::Pqr)?;
    Ok(fast_transform(phi, Kernel::E, Picture::Xyr))
}

/// `(ℱf)(p,q,r) = ∫ ē(px + qy + rz) f(x,y,z) dx dy dz`.
pub fn fourier(f: &SampledFunction) -> Result<SampledFunction> {
    f.require_picture(Picture::Xyz)?;
    let mut out = fast_transform(f, Kernel::EBar, Picture::Pqr);
    let delta = f.grid.slow_axis(Picture::Xyz).spacing();
    transform_axis(&mut out.data, f.n_fast(), f.n_slow(), 2, Kernel::EBar, delta);
    Ok(out)
}

/// `(ℱ⁻¹φ)(x,y,z) = ∫ e(px + qy + rz) φ(p,q,r) dp dq dr`.
pub fn inverse_fourier(phi: &SampledFunction) -> Result<SampledFunction> {
    phi.require_picture(Picture::Pqr)?;
    let mut out = fast_transform(phi, Kernel::E, Picture::Xyz);
    let delta = phi.grid.r.spacing();
    transform_axis(&mut out.data, phi.n_fast(), phi.n_slow(), 2, Kernel::E, delta);
    Ok(out)
}

/// Trapezoid quadrature of `∫ e(px + qy) φ(p,q,r) dp dq` over `[−half, half]²`.
pub fn quadrature_vee(phi: &ClosedFormFunction, x: f64, y: f64, r: f64, half: f64, step: f64) -> Result<C64> {
    if phi.n() != 1 {
        return Err(Error::Grid("quadrature oracle is written for n = 1".into()));
    }
    let m = (2.0 * half / step).round() as usize;
    let pts: Vec<f64> = (0..=m).map(|k| -half + k as f64 * step).collect();
    let w = |k: usize| if k == 0 || k == m { 0.5 } else { 1.0 };
    let ex: Vec<C64> = pts.iter().map(|&p| e(p * x)).collect();
    let ey: Vec<C64> = pts.iter().map(|&q| e(q * y)).collect();
    let mut acc = C64::new(0.0, 0.0);
    for (a, &p) in pts.iter().enumerate() {
        let mut row = C64::new(0.0, 0.0);
        for (b, &q) in pts.iter().enumerate() {
            row += w(b) * ey[b] * phi.eval(&[p], &[q], r, 0.0);
        }
        acc += w(a) * ex[a] * row;
    }
    Ok(acc * step * step)
}
