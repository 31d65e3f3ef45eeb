//! Grid-sampled scalar fields. Immutable after construction; every operation
//! returns a new field.

use super::domain::{Domain, Grid, SpaceTimeDomain};
use crate::error::{CzError, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField<G: Grid> {
    grid: G,
    values: Vec<f64>,
}

pub type SpatialField = ScalarField<Domain>;
pub type SpaceTimeField = ScalarField<SpaceTimeDomain>;

impl<G: Grid> ScalarField<G> {
    pub fn from_values(grid: G, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.node_count() {
            return Err(CzError::GridMismatch(format!(
                "expected {} values, got {}",
                grid.node_count(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(CzError::NonFiniteValues);
        }
        Ok(Self { grid, values })
    }

    pub fn constant(grid: G, c: f64) -> Result<Self> {
        let count = grid.node_count();
        Self::from_values(grid, vec![c; count])
    }

    pub fn grid(&self) -> &G {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, flat: usize) -> f64 {
        self.values[flat]
    }

    /// Apply a pointwise map; the result is re-validated for finiteness.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::from_values(self.grid.clone(), self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn zip(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.grid != other.grid {
            return Err(CzError::GridMismatch("fields live on different grids".into()));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Self::from_values(self.grid.clone(), values)
    }

    pub fn scale(&self, s: f64) -> Result<Self> {
        self.map(|v| s * v)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a - b)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl ScalarField<Domain> {
    /// Sample `f(x)` at every node.
    pub fn from_fn(domain: Domain, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let mut values = Vec::with_capacity(domain.node_count());
        for flat in 0..domain.node_count() {
            let x = domain.node_coords(flat);
            values.push(f(&x[..domain.n()]));
        }
        Self::from_values(domain, values)
    }
}

impl ScalarField<SpaceTimeDomain> {
    /// Sample `f(x, t)` at every space-time node.
    pub fn from_fn_xt(grid: SpaceTimeDomain, f: impl Fn(&[f64], f64) -> f64) -> Result<Self> {
        let space = grid.space().clone();
        let mut values = Vec::with_capacity(grid.node_count());
        for k in 0..grid.nt() {
            let t = grid.t_coord(k);
            for s in 0..space.node_count() {
                let x = space.node_coords(s);
                values.push(f(&x[..space.n()], t));
            }
        }
        Self::from_values(grid, values)
    }

    /// Borrow the values of time slice `k`.
    pub fn slice(&self, k: usize) -> &[f64] {
        let sc = self.grid.space().node_count();
        &self.values[k * sc..(k + 1) * sc]
    }

    /// Extract time slice `k` as a spatial field.
    pub fn slice_field(&self, k: usize) -> Result<ScalarField<Domain>> {
        ScalarField::from_values(self.grid.space().clone(), self.slice(k).to_vec())
    }

    /// Reverse the time axis (slice k -> nt-1-k). An involution, bitwise.
    pub fn time_reversed(&self) -> Self {
        let sc = self.grid.space().node_count();
        let nt = self.grid.nt();
        let mut values = Vec::with_capacity(self.values.len());
        for k in 0..nt {
            values.extend_from_slice(&self.values[(nt - 1 - k) * sc..(nt - k) * sc]);
        }
        Self {
            grid: self.grid.clone(),
            values,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_nan() {
        let d = Domain::unit_lab(1, 8).unwrap();
        let mut v = vec![0.0; 8];
        v[3] = f64::NAN;
        assert!(matches!(
            ScalarField::from_values(d, v),
            Err(CzError::NonFiniteValues)
        ));
    }

    #[test]
    fn time_reversal_is_involution() {
        let st = SpaceTimeDomain::unit_lab(1, 8, 8).unwrap();
        let u = ScalarField::from_fn_xt(st, |x, t| x[0] * t + t * t).unwrap();
        let back = u.time_reversed().time_reversed();
        assert_eq!(u.values(), back.values());
    }
}
