//! Theta-scheme heat solver: per-step SPD solves by conjugate gradients,
//! Dirichlet data on the box faces, trapezoidal (theta = 1/2) by default.

use super::cg;
use super::poisson::InteriorLattice;
use super::{Provenance, SolutionPair};
use crate::error::{CzError, Result};
use crate::fields::domain::{Domain, SpaceTimeDomain};
use crate::fields::scalar::ScalarField;

pub const DEFAULT_THETA: f64 = 0.5;

/// March `u_t - lap u = f` from the initial slice `u0`, taking boundary
/// values per slice from `boundary`. `theta` in `[1/2, 1]` selects the
/// scheme (1/2 trapezoidal, 1 implicit Euler). The recorded residual is the
/// worst per-step scheme defect divided by `tau`.
pub fn solve_heat(
    f: &ScalarField<SpaceTimeDomain>,
    u0: &ScalarField<Domain>,
    boundary: &ScalarField<SpaceTimeDomain>,
    theta: f64,
) -> Result<SolutionPair<SpaceTimeDomain>> {
    if !(0.5..=1.0).contains(&theta) {
        return Err(CzError::InvalidInput(format!(
            "theta must lie in [1/2, 1], got {theta}"
        )));
    }
    if f.grid() != boundary.grid() {
        return Err(CzError::GridMismatch(
            "forcing and boundary data live on different grids".into(),
        ));
    }
    let grid = f.grid().clone();
    if u0.grid() != grid.space() {
        return Err(CzError::GridMismatch(
            "initial data does not match the spatial grid".into(),
        ));
    }

    let space = grid.space().clone();
    let lattice = InteriorLattice::new(&space);
    let sc = space.node_count();
    let nt = grid.nt();
    let tau = grid.tau();
    let h2_inv = 1.0 / (space.h() * space.h());
    let gamma = theta * tau;
    let strides = space.strides();
    let n = space.n();
    let fv = f.values();
    let gv = boundary.values();

    let scale = 1.0 + u0.max_abs() + f.max_abs() + boundary.max_abs();
    let atol = 1e-12 * scale;

    let mut u = vec![0.0; grid.node_count()];
    u[..sc].copy_from_slice(u0.values());

    let mut x = vec![0.0; lattice.len()];
    for red in 0..lattice.len() {
        x[red] = u0.values()[lattice.full_flat(red)];
    }
    let mut rhs = vec![0.0; lattice.len()];
    let mut check = vec![0.0; lattice.len()];
    let mut worst_step_residual = 0.0f64;

    for k in 0..nt - 1 {
        {
            let prev = &u[k * sc..(k + 1) * sc];
            let g_next = &gv[(k + 1) * sc..(k + 2) * sc];
            for red in 0..lattice.len() {
                let full = lattice.full_flat(red);
                // explicit part: u^k + tau (1 - theta) lap u^k, full stencil
                let mut lap = -2.0 * n as f64 * prev[full];
                for a in 0..n {
                    lap += prev[full - strides[a]] + prev[full + strides[a]];
                }
                lap *= h2_inv;
                let f_mix = theta * fv[(k + 1) * sc + full] + (1.0 - theta) * fv[k * sc + full];
                rhs[red] = prev[full]
                    + tau * (1.0 - theta) * lap
                    + tau * f_mix
                    + gamma * h2_inv * lattice.boundary_neighbor_sum(&space, g_next, red);
            }
        }
        cg::solve(
            |p, out| lattice.apply_shifted(h2_inv, 1.0, gamma, p, out),
            &rhs,
            &mut x,
            atol,
            10_000,
            &format!("heat step {k}"),
        )?;
        let next = &mut u[(k + 1) * sc..(k + 2) * sc];
        next.copy_from_slice(&gv[(k + 1) * sc..(k + 2) * sc]);
        for red in 0..lattice.len() {
            next[lattice.full_flat(red)] = x[red];
        }
        lattice.apply_shifted(h2_inv, 1.0, gamma, &x, &mut check);
        let mut step_res = 0.0f64;
        for red in 0..lattice.len() {
            step_res = step_res.max((check[red] - rhs[red]).abs());
        }
        worst_step_residual = worst_step_residual.max(step_res / tau);
    }

    Ok(SolutionPair {
        u: ScalarField::from_values(grid, u)?,
        f: f.clone(),
        provenance: Provenance::Solved,
        residual: worst_step_residual,
    })
}
