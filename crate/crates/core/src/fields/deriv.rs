//! Finite-difference derivatives.
//!
//! Interior nodes use second-order central stencils; the boundary ring uses
//! one-sided second-order stencils. All stencils are exact on quadratics
//! (first differences also on affine data), which the blow-up polynomial
//! matching relies on.

use super::domain::{Domain, Grid, SpaceTimeDomain};
use super::scalar::ScalarField;
use super::tensor::{sym_components, SymTensorField};
use crate::error::Result;

/// Visit every 1-d line of a flattened array along one axis.
/// `count` is the total length, `extent` the number of nodes per line and
/// `stride` the flat step between consecutive line nodes.
fn for_each_line(count: usize, extent: usize, stride: usize, mut f: impl FnMut(usize)) {
    let block = extent * stride;
    let outer = count / block;
    for o in 0..outer {
        for inner in 0..stride {
            f(o * block + inner);
        }
    }
}

/// Second-order first difference along one line.
fn first_diff_line(v: &[f64], out: &mut [f64], base: usize, stride: usize, extent: usize, h: f64) {
    let at = |i: usize| v[base + i * stride];
    let inv2h = 1.0 / (2.0 * h);
    out[base] = (-3.0 * at(0) + 4.0 * at(1) - at(2)) * inv2h;
    for i in 1..extent - 1 {
        out[base + i * stride] = (at(i + 1) - at(i - 1)) * inv2h;
    }
    out[base + (extent - 1) * stride] =
        (3.0 * at(extent - 1) - 4.0 * at(extent - 2) + at(extent - 3)) * inv2h;
}

/// Second-order second difference along one line.
fn second_diff_line(v: &[f64], out: &mut [f64], base: usize, stride: usize, extent: usize, h: f64) {
    let at = |i: usize| v[base + i * stride];
    let invh2 = 1.0 / (h * h);
    out[base] = (2.0 * at(0) - 5.0 * at(1) + 4.0 * at(2) - at(3)) * invh2;
    for i in 1..extent - 1 {
        out[base + i * stride] = (at(i - 1) - 2.0 * at(i) + at(i + 1)) * invh2;
    }
    out[base + (extent - 1) * stride] = (2.0 * at(extent - 1) - 5.0 * at(extent - 2)
        + 4.0 * at(extent - 3)
        - at(extent - 4))
        * invh2;
}

fn axis_diff(values: &[f64], space: &Domain, slices: usize, axis: usize, second: bool) -> Vec<f64> {
    let mut out = vec![0.0; values.len()];
    let sc = space.node_count();
    let stride = space.strides()[axis];
    let m = space.m();
    let h = space.h();
    for k in 0..slices {
        let slab = &values[k * sc..(k + 1) * sc];
        let out_slab = &mut out[k * sc..(k + 1) * sc];
        for_each_line(sc, m, stride, |base| {
            if second {
                second_diff_line(slab, out_slab, base, stride, m, h);
            } else {
                first_diff_line(slab, out_slab, base, stride, m, h);
            }
        });
    }
    out
}

fn spatial_first_diff<G: Grid>(u: &ScalarField<G>, axis: usize) -> Vec<f64> {
    axis_diff(u.values(), u.grid().space(), u.grid().time_slices(), axis, false)
}

fn spatial_second_diff<G: Grid>(u: &ScalarField<G>, axis: usize) -> Vec<f64> {
    axis_diff(u.values(), u.grid().space(), u.grid().time_slices(), axis, true)
}

/// Spatial gradient, one field per axis.
pub fn gradient<G: Grid>(u: &ScalarField<G>) -> Result<Vec<ScalarField<G>>> {
    (0..u.grid().space().n())
        .map(|a| ScalarField::from_values(u.grid().clone(), spatial_first_diff(u, a)))
        .collect()
}

/// Spatial Hessian. Diagonal entries use the compact second difference,
/// mixed entries compose the two first-difference operators (which commute,
/// so the tensor is symmetric by construction).
pub fn hessian<G: Grid>(u: &ScalarField<G>) -> Result<SymTensorField<G>> {
    let space = u.grid().space().clone();
    let n = space.n();
    let mut first: Vec<Option<Vec<f64>>> = vec![None; n];
    let mut channels = Vec::new();
    for &(a, b) in sym_components(n) {
        if a == b {
            channels.push(spatial_second_diff(u, a));
        } else {
            if first[b].is_none() {
                first[b] = Some(spatial_first_diff(u, b));
            }
            let db = first[b].as_ref().unwrap();
            channels.push(axis_diff(db, &space, u.grid().time_slices(), a, false));
        }
    }
    SymTensorField::from_channels(u.grid().clone(), channels)
}

/// Spatial Laplacian: sum of the compact second differences, i.e. the
/// standard (2n+1)-point stencil at interior nodes.
pub fn laplacian<G: Grid>(u: &ScalarField<G>) -> Result<ScalarField<G>> {
    let n = u.grid().space().n();
    let mut acc = spatial_second_diff(u, 0);
    for a in 1..n {
        let d = spatial_second_diff(u, a);
        for (x, y) in acc.iter_mut().zip(&d) {
            *x += y;
        }
    }
    ScalarField::from_values(u.grid().clone(), acc)
}

/// Time derivative: centered in interior slices, one-sided second order at
/// the end slices.
pub fn dt(u: &ScalarField<SpaceTimeDomain>) -> Result<ScalarField<SpaceTimeDomain>> {
    let grid = u.grid();
    let sc = grid.space().node_count();
    let nt = grid.nt();
    let tau = grid.tau();
    let v = u.values();
    let mut out = vec![0.0; v.len()];
    for s in 0..sc {
        let at = |k: usize| v[k * sc + s];
        let inv2t = 1.0 / (2.0 * tau);
        out[s] = (-3.0 * at(0) + 4.0 * at(1) - at(2)) * inv2t;
        for k in 1..nt - 1 {
            out[k * sc + s] = (at(k + 1) - at(k - 1)) * inv2t;
        }
        out[(nt - 1) * sc + s] = (3.0 * at(nt - 1) - 4.0 * at(nt - 2) + at(nt - 3)) * inv2t;
    }
    ScalarField::from_values(grid.clone(), out)
}

/// Max-norm over interior spatial nodes (margin rings excluded on every
/// axis), all time slices. Used for stencil-exactness checks and residuals.
pub fn interior_max_abs<G: Grid>(field: &ScalarField<G>, margin: usize) -> f64 {
    let space = field.grid().space();
    let sc = space.node_count();
    let mut worst = 0.0f64;
    for (flat, &v) in field.values().iter().enumerate() {
        let idx = space.multi(flat % sc);
        if space.nodes_to_boundary(idx) >= margin {
            worst = worst.max(v.abs());
        }
    }
    worst
}
