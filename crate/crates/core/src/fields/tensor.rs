//! Symmetric-tensor fields: one upper-triangular symmetric matrix per node,
//! stored component-major so the maximal-operator convolutions can sweep one
//! contiguous channel at a time.

use super::domain::{Domain, Grid};
use crate::error::{CzError, Result};

/// Component index pairs `(a, b)` with `a <= b`, lexicographic. The pointwise
/// magnitude is the Frobenius norm, so off-diagonal components carry weight 2.
pub fn sym_components(n: usize) -> &'static [(usize, usize)] {
    match n {
        1 => &[(0, 0)],
        2 => &[(0, 0), (0, 1), (1, 1)],
        3 => &[(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)],
        _ => unreachable!("dimension checked at Domain construction"),
    }
}

pub fn component_weight(pair: (usize, usize)) -> f64 {
    if pair.0 == pair.1 {
        1.0
    } else {
        2.0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SymTensorField<G: Grid> {
    grid: G,
    /// `components * node_count` values, channel-major.
    values: Vec<f64>,
}

pub type SpatialTensorField = SymTensorField<Domain>;

impl<G: Grid> SymTensorField<G> {
    pub fn from_channels(grid: G, channels: Vec<Vec<f64>>) -> Result<Self> {
        let n = grid.space().n();
        let comps = sym_components(n).len();
        if channels.len() != comps {
            return Err(CzError::GridMismatch(format!(
                "expected {} tensor channels, got {}",
                comps,
                channels.len()
            )));
        }
        let count = grid.node_count();
        let mut values = Vec::with_capacity(comps * count);
        for ch in channels {
            if ch.len() != count {
                return Err(CzError::GridMismatch(format!(
                    "channel has {} values, expected {}",
                    ch.len(),
                    count
                )));
            }
            values.extend_from_slice(&ch);
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(CzError::NonFiniteValues);
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &G {
        &self.grid
    }

    pub fn component_count(&self) -> usize {
        sym_components(self.grid.space().n()).len()
    }

    /// Contiguous values of channel `c` (order given by `sym_components`).
    pub fn channel(&self, c: usize) -> &[f64] {
        let count = self.grid.node_count();
        &self.values[c * count..(c + 1) * count]
    }

    /// Entry `(a, b)` of the matrix at `flat` (symmetric lookup).
    pub fn entry(&self, flat: usize, a: usize, b: usize) -> f64 {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let c = sym_components(self.grid.space().n())
            .iter()
            .position(|&p| p == (lo, hi))
            .expect("valid component pair");
        self.channel(c)[flat]
    }

    /// Squared Frobenius norm of the matrix at `flat`.
    pub fn frob2(&self, flat: usize) -> f64 {
        let comps = sym_components(self.grid.space().n());
        let count = self.grid.node_count();
        let mut acc = 0.0;
        for (c, &pair) in comps.iter().enumerate() {
            let v = self.values[c * count + flat];
            acc += component_weight(pair) * v * v;
        }
        acc
    }

    pub fn frob(&self, flat: usize) -> f64 {
        self.frob2(flat).sqrt()
    }

    /// Pointwise linear combination `self + s * other`.
    pub fn add_scaled(&self, other: &Self, s: f64) -> Result<Self> {
        if self.grid != other.grid {
            return Err(CzError::GridMismatch("fields live on different grids".into()));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| a + s * b)
            .collect();
        Ok(Self {
            grid: self.grid.clone(),
            values,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frobenius_counts_off_diagonals_twice() {
        let d = Domain::unit_lab(2, 8).unwrap();
        let count = d.node_count();
        let t = SymTensorField::from_channels(
            d,
            vec![vec![1.0; count], vec![2.0; count], vec![3.0; count]],
        )
        .unwrap();
        // |M|_F^2 = 1 + 2*4 + 9 = 18
        assert!((t.frob2(0) - 18.0).abs() < 1e-14);
        assert!((t.entry(0, 1, 0) - 2.0).abs() < 1e-15);
    }
}
