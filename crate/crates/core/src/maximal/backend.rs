//! Evaluation backends for the maximal operators.
//!
//! * `Mask` — per radius, sweep the precomputed stencil offset-major over all
//!   evaluation points, accumulating the two moment sums (of `w` and `w^2`).
//! * `Brute` — per point, loop radii and offsets center-major. Accumulates the
//!   identical floating-point sequences as `Mask`, so the two must agree
//!   bitwise; it exists as the bookkeeping oracle for the fast path.
//! * `FftLike` — frequency-domain convolution with the region indicator;
//!   agrees with `Mask` to rounding (contract: 1e-9 relative), excluded from
//!   bitwise oracle tests.
//!
//! All reductions are ordered (radii ascending, offsets in stencil order), so
//! results are bitwise reproducible across thread counts.

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use super::stencil::{ball_multi_offsets, ball_reach, MaximalGeometry, Stencil};
use crate::fields::domain::Domain;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    Mask,
    FftLike,
    Brute,
}

impl std::str::FromStr for Backend {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "mask" => Ok(Backend::Mask),
            "fft-like" => Ok(Backend::FftLike),
            "brute" => Ok(Backend::Brute),
            other => Err(format!(
                "unknown maximal backend '{other}' (expected mask, fft-like or brute)"
            )),
        }
    }
}

impl std::fmt::Display for Backend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Backend::Mask => "mask",
            Backend::FftLike => "fft-like",
            Backend::Brute => "brute",
        })
    }
}

/// Shared moment-to-value step; every backend funnels through this exact
/// expression, which is what makes the bitwise mask/brute contract and the
/// zero-tolerance domination by the uncentered form possible.
#[inline]
fn moments_value(s1: f64, s2: f64, count: f64, weight: f64, centered: bool) -> f64 {
    let m1 = s1 / count;
    let m2 = s2 / count;
    if centered {
        weight * (m2 - m1 * m1)
    } else {
        weight * m2
    }
}

/// Per-radius slice of the evaluation: value and admissibility per point.
pub(crate) struct RadiusSlice {
    pub values: Vec<f64>,
    pub admissible: Vec<bool>,
}

pub(crate) fn eval_radius_slices<G: MaximalGeometry>(
    grid: &G,
    chans: &[(&[f64], f64)],
    points: &[usize],
    radii: &[f64],
    backend: Backend,
    centered: bool,
) -> Vec<RadiusSlice> {
    match backend {
        Backend::Mask => radii
            .par_iter()
            .map(|&r| mask_slice(grid, chans, points, r, centered))
            .collect(),
        Backend::Brute => brute_slices(grid, chans, points, radii, centered),
        Backend::FftLike => radii
            .par_iter()
            .map(|&r| fft_slice(grid, chans, points, r, centered))
            .collect(),
    }
}

fn mask_slice<G: MaximalGeometry>(
    grid: &G,
    chans: &[(&[f64], f64)],
    points: &[usize],
    r: f64,
    centered: bool,
) -> RadiusSlice {
    let stencil = grid.stencil(r);
    let admissible: Vec<bool> = points.iter().map(|&p| grid.admissible(p, r)).collect();
    let npts = points.len();
    let count = stencil.len() as f64;
    let mut values = vec![0.0; npts];
    let mut s1 = vec![0.0; npts];
    let mut s2 = vec![0.0; npts];
    for &(vals, weight) in chans {
        s1.iter_mut().for_each(|v| *v = 0.0);
        s2.iter_mut().for_each(|v| *v = 0.0);
        for &o in &stencil.offsets {
            for (pi, &p) in points.iter().enumerate() {
                if admissible[pi] {
                    let x = vals[(p as isize + o) as usize];
                    s1[pi] += x;
                    s2[pi] += x * x;
                }
            }
        }
        for pi in 0..npts {
            if admissible[pi] {
                values[pi] += moments_value(s1[pi], s2[pi], count, weight, centered);
            }
        }
    }
    RadiusSlice { values, admissible }
}

fn brute_slices<G: MaximalGeometry>(
    grid: &G,
    chans: &[(&[f64], f64)],
    points: &[usize],
    radii: &[f64],
    centered: bool,
) -> Vec<RadiusSlice> {
    let stencils: Vec<Stencil> = radii.iter().map(|&r| grid.stencil(r)).collect();
    // per point, all radii; transposed into per-radius slices afterwards
    let per_point: Vec<Vec<Option<f64>>> = points
        .par_iter()
        .map(|&p| {
            radii
                .iter()
                .zip(&stencils)
                .map(|(&r, stencil)| {
                    if !grid.admissible(p, r) {
                        return None;
                    }
                    let count = stencil.len() as f64;
                    let mut value = 0.0;
                    for &(vals, weight) in chans {
                        let mut s1 = 0.0;
                        let mut s2 = 0.0;
                        for &o in &stencil.offsets {
                            let x = vals[(p as isize + o) as usize];
                            s1 += x;
                            s2 += x * x;
                        }
                        value += moments_value(s1, s2, count, weight, centered);
                    }
                    Some(value)
                })
                .collect()
        })
        .collect();
    (0..radii.len())
        .map(|ri| {
            let mut values = vec![0.0; points.len()];
            let mut admissible = vec![false; points.len()];
            for (pi, row) in per_point.iter().enumerate() {
                if let Some(v) = row[ri] {
                    values[pi] = v;
                    admissible[pi] = true;
                }
            }
            RadiusSlice { values, admissible }
        })
        .collect()
}

// ---------------------------------------------------------------------------
// frequency-domain backend
// ---------------------------------------------------------------------------

/// In-place complex FFT along every axis of a row-major hyper-rectangle.
fn fft_nd(data: &mut [Complex64], dims: &[usize], inverse: bool) {
    let mut planner = FftPlanner::new();
    let total: usize = dims.iter().product();
    for axis in 0..dims.len() {
        let len = dims[axis];
        let stride: usize = dims[axis + 1..].iter().product();
        let fft = if inverse {
            planner.plan_fft_inverse(len)
        } else {
            planner.plan_fft_forward(len)
        };
        let block = len * stride;
        let mut line = vec![Complex64::default(); len];
        for outer in 0..total / block {
            for inner in 0..stride {
                let base = outer * block + inner;
                for (i, slot) in line.iter_mut().enumerate() {
                    *slot = data[base + i * stride];
                }
                fft.process(&mut line);
                for (i, slot) in line.iter().enumerate() {
                    data[base + i * stride] = *slot;
                }
            }
        }
    }
}

/// Sum of `values` over the ball stencil around every node, via zero-padded
/// circular convolution (the ball indicator is symmetric, so correlation and
/// convolution coincide). Nodes whose ball leaves the box hold garbage and are
/// masked by admissibility in the caller.
fn fft_ball_sum(space: &Domain, values: &[f64], r: f64) -> Vec<f64> {
    let n = space.n();
    let m = space.m();
    let reach = ball_reach(space.h(), r) as usize;
    let pad = m + 2 * reach;
    let dims: Vec<usize> = vec![pad; n];
    let total: usize = dims.iter().product();

    let mut pad_strides = vec![0usize; n];
    let mut acc = 1;
    for a in (0..n).rev() {
        pad_strides[a] = acc;
        acc *= pad;
    }

    let mut data = vec![Complex64::default(); total];
    for flat in 0..space.node_count() {
        let idx = space.multi(flat);
        let mut dst = 0;
        for a in 0..n {
            dst += idx[a] * pad_strides[a];
        }
        data[dst] = Complex64::new(values[flat], 0.0);
    }

    let mut mask = vec![Complex64::default(); total];
    for o in ball_multi_offsets(space, r) {
        let mut dst = 0;
        for a in 0..n {
            dst += (o[a].rem_euclid(pad as i64)) as usize * pad_strides[a];
        }
        mask[dst] += Complex64::new(1.0, 0.0);
    }

    fft_nd(&mut data, &dims, false);
    fft_nd(&mut mask, &dims, false);
    for (d, mk) in data.iter_mut().zip(&mask) {
        *d *= mk;
    }
    fft_nd(&mut data, &dims, true);
    let scale = 1.0 / total as f64;

    let mut out = vec![0.0; space.node_count()];
    for flat in 0..space.node_count() {
        let idx = space.multi(flat);
        let mut dst = 0;
        for a in 0..n {
            dst += idx[a] * pad_strides[a];
        }
        out[flat] = data[dst].re * scale;
    }
    out
}

/// Stencil sums of `values` at every node: pure spatial convolution on a
/// spatial grid, spatial convolution per slice plus a time-window sum on a
/// space-time grid.
fn region_sum_full<G: MaximalGeometry>(grid: &G, values: &[f64], r: f64) -> Vec<f64> {
    match grid.time_step() {
        None => fft_ball_sum(grid.space(), values, r),
        Some(tau) => {
            let sc = grid.space().node_count();
            let nt = grid.time_slices();
            let per_slice: Vec<Vec<f64>> = (0..nt)
                .map(|k| fft_ball_sum(grid.space(), &values[k * sc..(k + 1) * sc], r))
                .collect();
            let (dk_min, dk_max) = super::stencil::time_window_offsets(tau, r);
            let mut out = vec![0.0; values.len()];
            for k in 0..nt as i64 {
                let (lo, hi) = (k + dk_min, k + dk_max);
                if lo < 0 || hi >= nt as i64 {
                    continue;
                }
                let dst = &mut out[k as usize * sc..(k as usize + 1) * sc];
                for kk in lo..=hi {
                    for (d, s) in dst.iter_mut().zip(&per_slice[kk as usize]) {
                        *d += s;
                    }
                }
            }
            out
        }
    }
}

fn fft_slice<G: MaximalGeometry>(
    grid: &G,
    chans: &[(&[f64], f64)],
    points: &[usize],
    r: f64,
    centered: bool,
) -> RadiusSlice {
    let count = grid.stencil(r).len() as f64;
    let admissible: Vec<bool> = points.iter().map(|&p| grid.admissible(p, r)).collect();
    let mut values = vec![0.0; points.len()];
    for &(vals, weight) in chans {
        let squared: Vec<f64> = vals.iter().map(|&v| v * v).collect();
        let s1 = region_sum_full(grid, vals, r);
        let s2 = region_sum_full(grid, &squared, r);
        for (pi, &p) in points.iter().enumerate() {
            if admissible[pi] {
                values[pi] += moments_value(s1[p], s2[p], count, weight, centered);
            }
        }
    }
    RadiusSlice { values, admissible }
}
