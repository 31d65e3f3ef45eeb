//! Deterministic sample-point sets. Points are drawn as continuum
//! coordinates, independent of any grid, then snapped to nodes; the same
//! point set therefore drives every refinement level.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::fields::domain::{Domain, SpaceTimeDomain};

const POINT_SEED: u64 = 0x63_7a_70_74_73; // "czpts"

/// `count` continuum points inside the ball of radius `rho`: a sunflower
/// spiral in 2-d, seeded rejection sampling otherwise.
pub fn ball_points(n: usize, rho: f64, count: usize) -> Vec<[f64; 3]> {
    if n == 2 {
        let golden = std::f64::consts::PI * (3.0 - (5.0f64).sqrt());
        (0..count)
            .map(|i| {
                let r = rho * ((i as f64 + 0.5) / count as f64).sqrt();
                let phi = golden * i as f64;
                [r * phi.cos(), r * phi.sin(), 0.0]
            })
            .collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(POINT_SEED ^ (n as u64) << 8);
        let mut out = Vec::with_capacity(count);
        while out.len() < count {
            let mut x = [0.0; 3];
            let mut r2 = 0.0;
            for slot in x.iter_mut().take(n) {
                *slot = rng.random_range(-rho..rho);
                r2 += *slot * *slot;
            }
            if r2 <= rho * rho {
                out.push(x);
            }
        }
        out
    }
}

/// Snap continuum points to nodes, deduplicating while preserving order.
pub fn snap_to_nodes(domain: &Domain, pts: &[[f64; 3]]) -> Vec<usize> {
    let mut out = Vec::with_capacity(pts.len());
    for p in pts {
        let flat = domain.flat(domain.nearest_node(&p[..domain.n()]));
        if !out.contains(&flat) {
            out.push(flat);
        }
    }
    out
}

/// Space-time points inside `Q_rho(0, 0)`: spatial ball points paired with a
/// deterministic spread of times in `(-rho^2/2, rho^2/2)`.
pub fn cube_points(grid: &SpaceTimeDomain, rho: f64, count: usize) -> Vec<usize> {
    let n = grid.space().n();
    let spatial = ball_points(n, 0.96 * rho, count);
    let half_window = 0.45 * rho * rho;
    let mut out = Vec::with_capacity(count);
    for (i, p) in spatial.iter().enumerate() {
        // times sweep the window back and forth, avoiding the open left edge
        let frac = (i as f64 + 0.5) / count as f64;
        let t = -half_window + 2.0 * half_window * frac;
        let k = grid.nearest_slice(t);
        let s = grid.space().flat(grid.space().nearest_node(&p[..n]));
        let flat = grid.flat(k, s);
        if !out.contains(&flat) {
            out.push(flat);
        }
    }
    out
}
