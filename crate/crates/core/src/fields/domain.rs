//! Uniform Cartesian grids: a spatial box in dimension 1..=3 and its
//! space-time extension.
//!
//! Coordinates are stored in fixed `[f64; 3]` arrays; only the first `n`
//! entries are meaningful. Spatial nodes are flattened row-major with axis 0
//! slowest; space-time nodes add a leading time index (time slowest), so each
//! time slice is a contiguous spatial block.

use crate::error::{CzError, Result};

/// Minimum number of grid points per axis; the widest stencil (one-sided
/// second order) needs 4 points and the maximal-operator ladder needs room
/// for balls of radius >= 2h.
pub const MIN_POINTS_PER_AXIS: usize = 8;

/// Axis-aligned box `[lo, hi]^n` sampled on `m` uniformly spaced points per
/// axis. Every axis shares the same spacing `h = (hi - lo) / (m - 1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Domain {
    n: usize,
    m: usize,
    lo: [f64; 3],
    hi: [f64; 3],
    h: f64,
}

impl Domain {
    pub fn new(n: usize, mut lo: [f64; 3], mut hi: [f64; 3], m: usize) -> Result<Self> {
        for a in n..3 {
            lo[a] = 0.0;
            hi[a] = 0.0;
        }
        if !(1..=3).contains(&n) {
            return Err(CzError::InvalidDomain(format!(
                "spatial dimension must be 1, 2 or 3, got {n}"
            )));
        }
        if m < MIN_POINTS_PER_AXIS {
            return Err(CzError::DomainTooSmall {
                m,
                min: MIN_POINTS_PER_AXIS,
            });
        }
        let extent = hi[0] - lo[0];
        if !extent.is_finite() || extent <= 0.0 {
            return Err(CzError::InvalidDomain(format!(
                "box extent must be positive and finite, got {extent}"
            )));
        }
        for a in 1..n {
            let e = hi[a] - lo[a];
            if (e - extent).abs() > 1e-12 * extent.abs() {
                return Err(CzError::InvalidDomain(format!(
                    "axis extents must match for uniform spacing: axis 0 has {extent}, axis {a} has {e}"
                )));
            }
        }
        let h = extent / (m - 1) as f64;
        Ok(Self { n, m, lo, hi, h })
    }

    /// The box `[-half, half]^n`. The lab default (`half = 2`) leaves the
    /// whole of `B_2` strictly inside the grid for unit-ball experiments.
    pub fn symmetric_box(n: usize, half: f64, m: usize) -> Result<Self> {
        Self::new(n, [-half; 3], [half; 3], m)
    }

    /// Default experiment box `[-2, 2]^n`.
    pub fn unit_lab(n: usize, m: usize) -> Result<Self> {
        Self::symmetric_box(n, 2.0, m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo[..self.n]
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi[..self.n]
    }

    pub fn node_count(&self) -> usize {
        self.m.pow(self.n as u32)
    }

    /// Flattening strides per axis (axis 0 slowest, axis n-1 contiguous).
    pub fn strides(&self) -> [usize; 3] {
        let mut s = [0usize; 3];
        let mut acc = 1;
        for a in (0..self.n).rev() {
            s[a] = acc;
            acc *= self.m;
        }
        s
    }

    pub fn coord(&self, axis: usize, i: usize) -> f64 {
        self.lo[axis] + i as f64 * self.h
    }

    pub fn flat(&self, idx: [usize; 3]) -> usize {
        let mut f = 0;
        for a in 0..self.n {
            f = f * self.m + idx[a];
        }
        f
    }

    pub fn multi(&self, mut flat: usize) -> [usize; 3] {
        let mut idx = [0usize; 3];
        for a in (0..self.n).rev() {
            idx[a] = flat % self.m;
            flat /= self.m;
        }
        idx
    }

    pub fn node_coords(&self, flat: usize) -> [f64; 3] {
        let idx = self.multi(flat);
        let mut x = [0.0; 3];
        for a in 0..self.n {
            x[a] = self.coord(a, idx[a]);
        }
        x
    }

    /// Index of the grid node nearest to `x` (clamped to the box).
    pub fn nearest_node(&self, x: &[f64]) -> [usize; 3] {
        let mut idx = [0usize; 3];
        for a in 0..self.n {
            let c = (x[a] - self.lo[a]) / self.h;
            let i = c.round().max(0.0) as usize;
            idx[a] = i.min(self.m - 1);
        }
        idx
    }

    /// Distance (in node counts) from `idx` to the nearest box face.
    pub fn nodes_to_boundary(&self, idx: [usize; 3]) -> usize {
        let mut d = usize::MAX;
        for a in 0..self.n {
            d = d.min(idx[a]).min(self.m - 1 - idx[a]);
        }
        d
    }

    /// Half the box width: the largest ball radius that fits anywhere.
    pub fn half_width(&self) -> f64 {
        0.5 * (self.hi[0] - self.lo[0])
    }

    pub fn iter_nodes(&self) -> impl Iterator<Item = usize> {
        0..self.node_count()
    }
}

/// `Domain x [t_lo, t_hi]` sampled on `nt` time slices with step `tau`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpaceTimeDomain {
    space: Domain,
    t_lo: f64,
    t_hi: f64,
    nt: usize,
    tau: f64,
}

pub const MIN_TIME_SLICES: usize = 8;

impl SpaceTimeDomain {
    pub fn new(space: Domain, t_lo: f64, t_hi: f64, nt: usize) -> Result<Self> {
        if nt < MIN_TIME_SLICES {
            return Err(CzError::DomainTooSmall {
                m: nt,
                min: MIN_TIME_SLICES,
            });
        }
        let extent = t_hi - t_lo;
        if !extent.is_finite() || extent <= 0.0 {
            return Err(CzError::InvalidDomain(format!(
                "time extent must be positive and finite, got {extent}"
            )));
        }
        let tau = extent / (nt - 1) as f64;
        Ok(Self {
            space,
            t_lo,
            t_hi,
            nt,
            tau,
        })
    }

    /// Parabolic-scaling default `tau = h^2 / 2`; `nt` is rounded so the
    /// slices span `[t_lo, t_hi]` exactly.
    pub fn with_parabolic_step(space: Domain, t_lo: f64, t_hi: f64) -> Result<Self> {
        let target = space.h() * space.h() / 2.0;
        let nt = (((t_hi - t_lo) / target).round() as usize + 1).max(MIN_TIME_SLICES);
        Self::new(space, t_lo, t_hi, nt)
    }

    /// Symmetric lab box `[-2,2]^n x [-2,2]`: holds `Q_2 = B_2 x (-2, 2]`.
    pub fn unit_lab(n: usize, m: usize, nt: usize) -> Result<Self> {
        Self::new(Domain::unit_lab(n, m)?, -2.0, 2.0, nt)
    }

    pub fn space(&self) -> &Domain {
        &self.space
    }

    pub fn nt(&self) -> usize {
        self.nt
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn t_lo(&self) -> f64 {
        self.t_lo
    }

    pub fn t_hi(&self) -> f64 {
        self.t_hi
    }

    pub fn t_coord(&self, k: usize) -> f64 {
        self.t_lo + k as f64 * self.tau
    }

    pub fn node_count(&self) -> usize {
        self.space.node_count() * self.nt
    }

    /// Flat index of spatial node `s` on time slice `k`.
    pub fn flat(&self, k: usize, s: usize) -> usize {
        k * self.space.node_count() + s
    }

    pub fn split(&self, flat: usize) -> (usize, usize) {
        let sc = self.space.node_count();
        (flat / sc, flat % sc)
    }

    pub fn nearest_slice(&self, t: f64) -> usize {
        let k = ((t - self.t_lo) / self.tau).round().max(0.0) as usize;
        k.min(self.nt - 1)
    }
}

/// Common geometry interface for spatial and space-time grids, so fields,
/// regions and norms can be written once.
pub trait Grid: Clone + PartialEq + std::fmt::Debug {
    fn space(&self) -> &Domain;
    /// Number of time slices (1 for a purely spatial grid).
    fn time_slices(&self) -> usize;
    fn time_step(&self) -> Option<f64>;
    fn time_coord(&self, k: usize) -> Option<f64>;
    fn node_count(&self) -> usize {
        self.space().node_count() * self.time_slices()
    }
    /// Quadrature weight of one node: `h^n`, times `tau` on space-time grids.
    fn cell_measure(&self) -> f64;
    /// Spatial part of a flat node index.
    fn spatial_index(&self, flat: usize) -> usize;
    /// Time slice of a flat node index (0 on spatial grids).
    fn time_index(&self, flat: usize) -> usize;
}

impl Grid for Domain {
    fn space(&self) -> &Domain {
        self
    }

    fn time_slices(&self) -> usize {
        1
    }

    fn time_step(&self) -> Option<f64> {
        None
    }

    fn time_coord(&self, _k: usize) -> Option<f64> {
        None
    }

    fn cell_measure(&self) -> f64 {
        self.h.powi(self.n as i32)
    }

    fn spatial_index(&self, flat: usize) -> usize {
        flat
    }

    fn time_index(&self, _flat: usize) -> usize {
        0
    }
}

impl Grid for SpaceTimeDomain {
    fn space(&self) -> &Domain {
        &self.space
    }

    fn time_slices(&self) -> usize {
        self.nt
    }

    fn time_step(&self) -> Option<f64> {
        Some(self.tau)
    }

    fn time_coord(&self, k: usize) -> Option<f64> {
        Some(self.t_coord(k))
    }

    fn cell_measure(&self) -> f64 {
        self.space.cell_measure() * self.tau
    }

    fn spatial_index(&self, flat: usize) -> usize {
        flat % self.space.node_count()
    }

    fn time_index(&self, flat: usize) -> usize {
        flat / self.space.node_count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn domain_rejects_tiny_grids() {
        assert!(matches!(
            Domain::unit_lab(2, 4),
            Err(CzError::DomainTooSmall { .. })
        ));
    }

    #[test]
    fn domain_rejects_mismatched_extents() {
        let r = Domain::new(2, [0.0, 0.0, 0.0], [1.0, 2.0, 0.0], 16);
        assert!(matches!(r, Err(CzError::InvalidDomain(_))));
    }

    #[test]
    fn flat_multi_roundtrip() {
        let d = Domain::unit_lab(3, 9).unwrap();
        for flat in [0, 1, 17, 500, d.node_count() - 1] {
            assert_eq!(d.flat(d.multi(flat)), flat);
        }
    }

    #[test]
    fn spacing_is_uniform() {
        let d = Domain::unit_lab(2, 65).unwrap();
        assert!((d.h() - 4.0 / 64.0).abs() < 1e-15);
        assert!((d.coord(0, 32) - 0.0).abs() < 1e-14);
    }

    #[test]
    fn spacetime_split_roundtrip() {
        let st = SpaceTimeDomain::unit_lab(2, 8, 9).unwrap();
        let flat = st.flat(3, 17);
        assert_eq!(st.split(flat), (3, 17));
        assert!((st.tau() - 0.5).abs() < 1e-15);
    }
}
