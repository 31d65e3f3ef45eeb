//! Discrete Poisson solver: the (2n+1)-point Laplacian with Dirichlet data on
//! the box boundary, solved by conjugate gradients on the interior lattice.

use super::cg;
use super::{Provenance, SolutionPair};
use crate::error::{CzError, Result};
use crate::fields::domain::Domain;
use crate::fields::scalar::ScalarField;

/// Row-major view of the interior nodes (one-node margin stripped).
pub(crate) struct InteriorLattice {
    pub n: usize,
    pub m: usize,
    pub inner: usize,
}

impl InteriorLattice {
    pub fn new(domain: &Domain) -> Self {
        Self {
            n: domain.n(),
            m: domain.m(),
            inner: domain.m() - 2,
        }
    }

    pub fn len(&self) -> usize {
        self.inner.pow(self.n as u32)
    }

    pub fn inner_multi(&self, mut reduced: usize) -> [usize; 3] {
        let mut idx = [0usize; 3];
        for a in (0..self.n).rev() {
            idx[a] = reduced % self.inner;
            reduced /= self.inner;
        }
        idx
    }

    /// Flat index on the full grid of a reduced interior index.
    pub fn full_flat(&self, reduced: usize) -> usize {
        let idx = self.inner_multi(reduced);
        let mut f = 0;
        for a in 0..self.n {
            f = f * self.m + idx[a] + 1;
        }
        f
    }

    /// Apply `y = (2n x_i - sum_j x_j) / h^2` over interior neighbors only
    /// (the SPD negative Laplacian with homogeneous Dirichlet closure).
    pub fn apply_neg_laplacian(&self, h2_inv: f64, x: &[f64], out: &mut [f64]) {
        self.apply_shifted(h2_inv, 0.0, 1.0, x, out);
    }

    /// `y = sigma x + gamma (2n x_i - sum_j x_j) / h^2`; the theta-scheme
    /// step operator uses `sigma = 1`, `gamma = theta tau`.
    pub fn apply_shifted(&self, h2_inv: f64, sigma: f64, gamma: f64, x: &[f64], out: &mut [f64]) {
        let n = self.n;
        let inner = self.inner;
        let diag = 2.0 * n as f64;
        let mut strides = [0usize; 3];
        let mut acc = 1;
        for a in (0..n).rev() {
            strides[a] = acc;
            acc *= inner;
        }
        for reduced in 0..self.len() {
            let idx = self.inner_multi(reduced);
            let mut v = diag * x[reduced];
            for a in 0..n {
                if idx[a] > 0 {
                    v -= x[reduced - strides[a]];
                }
                if idx[a] + 1 < inner {
                    v -= x[reduced + strides[a]];
                }
            }
            out[reduced] = sigma * x[reduced] + gamma * v * h2_inv;
        }
    }

    /// Sum of boundary-node values adjacent to the reduced interior node.
    pub fn boundary_neighbor_sum(&self, domain: &Domain, g: &[f64], reduced: usize) -> f64 {
        let idx = self.inner_multi(reduced);
        let strides = domain.strides();
        let full = self.full_flat(reduced);
        let mut s = 0.0;
        for a in 0..self.n {
            if idx[a] == 0 {
                s += g[full - strides[a]];
            }
            if idx[a] + 1 == self.inner {
                s += g[full + strides[a]];
            }
        }
        s
    }
}

/// Solve `lap u = f` on the box with Dirichlet values `boundary` on the box
/// faces, to a max-norm residual of about `1e-11` times the data scale.
pub fn solve_poisson(
    f: &ScalarField<Domain>,
    boundary: &ScalarField<Domain>,
) -> Result<SolutionPair<Domain>> {
    if f.grid() != boundary.grid() {
        return Err(CzError::GridMismatch(
            "forcing and boundary data live on different grids".into(),
        ));
    }
    let domain = f.grid().clone();
    let lattice = InteriorLattice::new(&domain);
    let h2_inv = 1.0 / (domain.h() * domain.h());

    let fv = f.values();
    let gv = boundary.values();
    let mut b = vec![0.0; lattice.len()];
    for reduced in 0..lattice.len() {
        b[reduced] = -fv[lattice.full_flat(reduced)]
            + lattice.boundary_neighbor_sum(&domain, gv, reduced) * h2_inv;
    }

    let atol = 1e-11 * (1.0 + f.max_abs() + boundary.max_abs());
    let max_iters = 10_000.max(60 * domain.m());
    let mut x = vec![0.0; lattice.len()];
    let outcome = cg::solve(
        |p, out| lattice.apply_neg_laplacian(h2_inv, p, out),
        &b,
        &mut x,
        atol,
        max_iters,
        "poisson",
    )?;

    let mut u = gv.to_vec();
    for reduced in 0..lattice.len() {
        u[lattice.full_flat(reduced)] = x[reduced];
    }
    Ok(SolutionPair {
        u: ScalarField::from_values(domain, u)?,
        f: f.clone(),
        provenance: Provenance::Solved,
        residual: outcome.residual,
    })
}
