//! Precomputed node-offset stencils for balls and parabolic cubes.
//!
//! A stencil is the list of flat-index offsets of all nodes inside the region
//! centered at a node, in a fixed deterministic order (time-major, then
//! axis-0-major spatially). Admissibility of a radius at a point means the
//! continuum region fits inside the grid box, which guarantees every stencil
//! offset lands on an existing node.

use crate::fields::domain::{Domain, Grid, SpaceTimeDomain};

#[derive(Clone, Debug)]
pub struct Stencil {
    /// Flat-index offsets relative to the center node.
    pub offsets: Vec<isize>,
}

impl Stencil {
    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }
}

/// Largest per-axis node reach of a ball of radius `r`: the greatest integer
/// `k` with `k * h <= r` under the exact floating-point predicate used for
/// membership.
pub(crate) fn ball_reach(h: f64, r: f64) -> i64 {
    let mut reach = (r / h).floor() as i64;
    while ((reach + 1) as f64 * h) <= r {
        reach += 1;
    }
    while reach > 0 && (reach as f64 * h) > r {
        reach -= 1;
    }
    reach
}

/// Spatial ball offsets: integer moves `o` with `|o| * h` inside the ball.
pub(crate) fn ball_multi_offsets(space: &Domain, r: f64) -> Vec<[i64; 3]> {
    let n = space.n();
    let h = space.h();
    let reach = ball_reach(h, r);
    let width = (2 * reach + 1) as usize;
    let r2 = r * r;
    let mut out = Vec::new();
    for c in 0..width.pow(n as u32) {
        let mut rem = c;
        let mut o = [0i64; 3];
        for a in (0..n).rev() {
            o[a] = (rem % width) as i64 - reach;
            rem /= width;
        }
        let mut d2 = 0.0;
        for a in 0..n {
            let d = o[a] as f64 * h;
            d2 += d * d;
        }
        if d2 <= r2 {
            out.push(o);
        }
    }
    out
}

fn flatten_spatial(space: &Domain, multi: &[[i64; 3]]) -> Vec<isize> {
    let strides = space.strides();
    multi
        .iter()
        .map(|o| {
            let mut f = 0isize;
            for a in 0..space.n() {
                f += o[a] as isize * strides[a] as isize;
            }
            f
        })
        .collect()
}

pub fn ball_stencil(space: &Domain, r: f64) -> Stencil {
    Stencil {
        offsets: flatten_spatial(space, &ball_multi_offsets(space, r)),
    }
}

/// Time-slice offsets `dk` with `dk * tau` in the half-open window
/// `(-r^2/2, r^2/2]`.
pub fn time_window_offsets(tau: f64, r: f64) -> (i64, i64) {
    let half = 0.5 * r * r;
    let mut dk_max = (half / tau).floor() as i64;
    while ((dk_max + 1) as f64 * tau) <= half {
        dk_max += 1;
    }
    while dk_max > 0 && (dk_max as f64 * tau) > half {
        dk_max -= 1;
    }
    let mut dk_min = -dk_max - 1;
    while (dk_min as f64 * tau) <= -half {
        dk_min += 1;
    }
    (dk_min, dk_max)
}

pub fn cube_stencil(grid: &SpaceTimeDomain, r: f64) -> Stencil {
    let spatial = ball_multi_offsets(grid.space(), r);
    let flat_spatial = flatten_spatial(grid.space(), &spatial);
    let (dk_min, dk_max) = time_window_offsets(grid.tau(), r);
    let sc = grid.space().node_count() as isize;
    let mut offsets = Vec::with_capacity(flat_spatial.len() * (dk_max - dk_min + 1) as usize);
    for dk in dk_min..=dk_max {
        for &s in &flat_spatial {
            offsets.push(dk as isize * sc + s);
        }
    }
    Stencil { offsets }
}

/// Geometry hooks the maximal engine needs from a grid.
pub trait MaximalGeometry: Grid + Sync {
    fn stencil(&self, r: f64) -> Stencil;
    /// Continuum region of radius `r` centered at the node fits in the box.
    fn admissible(&self, flat: usize, r: f64) -> bool;
}

impl MaximalGeometry for Domain {
    fn stencil(&self, r: f64) -> Stencil {
        ball_stencil(self, r)
    }

    fn admissible(&self, flat: usize, r: f64) -> bool {
        let idx = self.multi(flat);
        let h = self.h();
        for a in 0..self.n() {
            if (idx[a] as f64 * h) < r || ((self.m() - 1 - idx[a]) as f64 * h) < r {
                return false;
            }
        }
        true
    }
}

impl MaximalGeometry for SpaceTimeDomain {
    fn stencil(&self, r: f64) -> Stencil {
        cube_stencil(self, r)
    }

    fn admissible(&self, flat: usize, r: f64) -> bool {
        let (k, s) = self.split(flat);
        if !self.space().admissible(s, r) {
            return false;
        }
        let half = 0.5 * r * r;
        let t = self.t_coord(k);
        t - self.t_lo() >= half && self.t_hi() - t >= half
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::domain::Domain;

    #[test]
    fn ball_stencil_counts() {
        let d = Domain::unit_lab(1, 17).unwrap();
        let h = d.h();
        // r = 2h in 1d: offsets -2..2 -> 5 nodes
        assert_eq!(ball_stencil(&d, 2.0 * h).len(), 5);
        let d2 = Domain::unit_lab(2, 17).unwrap();
        // r = 2h in 2d: 13 nodes of the discrete disk
        assert_eq!(ball_stencil(&d2, 2.0 * d2.h()).len(), 13);
    }

    #[test]
    fn time_window_is_half_open() {
        // tau = 1, half = 2.0: dk in (-2, 2] -> {-1, 0, 1, 2}
        let (lo, hi) = time_window_offsets(1.0, 2.0);
        assert_eq!((lo, hi), (-1, 2));
        // non-integer boundary: half = 2.5 -> {-2,...,2}
        let (lo, hi) = time_window_offsets(1.0, (5.0f64).sqrt());
        assert_eq!((lo, hi), (-2, 2));
    }

    #[test]
    fn admissibility_respects_box() {
        let d = Domain::unit_lab(2, 17).unwrap();
        let center = d.flat([8, 8, 0]);
        let corner = d.flat([1, 8, 0]);
        assert!(d.admissible(center, 1.0));
        assert!(!d.admissible(corner, 1.0));
        assert!(d.admissible(corner, d.h()));
    }
}
