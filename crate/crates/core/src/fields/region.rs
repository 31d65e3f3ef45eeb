//! Discrete regions (balls and parabolic cubes), node-membership averages and
//! Riemann-sum Lp norms.
//!
//! Membership is decided purely by node centers: a node belongs to `B_r(c)`
//! iff `|x - c| <= r`, and to `Q_r(c, tc)` iff additionally its time lies in
//! the half-open window `(tc - r^2/2, tc + r^2/2]`. No partial-cell weights,
//! so averages stay exactly linear in the field.

use super::domain::Grid;
use super::scalar::ScalarField;
use super::tensor::{component_weight, sym_components, SymTensorField};
use crate::error::{CzError, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum Region {
    Ball {
        center: [f64; 3],
        r: f64,
    },
    ParabolicCube {
        center: [f64; 3],
        t_center: f64,
        r: f64,
    },
}

impl Region {
    pub fn ball(center: [f64; 3], r: f64) -> Self {
        Region::Ball { center, r }
    }

    pub fn cube(center: [f64; 3], t_center: f64, r: f64) -> Self {
        Region::ParabolicCube {
            center,
            t_center,
            r,
        }
    }

    pub fn radius(&self) -> f64 {
        match self {
            Region::Ball { r, .. } | Region::ParabolicCube { r, .. } => *r,
        }
    }
}

/// Flat indices of the spatial nodes inside `B_r(center)`, ascending.
fn ball_spatial_nodes(space: &super::domain::Domain, center: &[f64; 3], r: f64) -> Vec<usize> {
    let n = space.n();
    let h = space.h();
    let m = space.m();
    let mut lo_i = [0usize; 3];
    let mut hi_i = [0usize; 3];
    for a in 0..n {
        let lo = ((center[a] - r - space.lo()[a]) / h).ceil().max(0.0);
        let hi = ((center[a] + r - space.lo()[a]) / h).floor();
        if hi < 0.0 || lo > (m - 1) as f64 || hi < lo {
            return Vec::new();
        }
        lo_i[a] = lo as usize;
        hi_i[a] = (hi as usize).min(m - 1);
    }
    let r2 = r * r;
    let mut nodes = Vec::new();
    let mut idx = lo_i;
    loop {
        let mut d2 = 0.0;
        for a in 0..n {
            let dx = space.coord(a, idx[a]) - center[a];
            d2 += dx * dx;
        }
        if d2 <= r2 {
            nodes.push(space.flat(idx));
        }
        // odometer over [lo_i, hi_i]
        let mut a = n;
        loop {
            if a == 0 {
                nodes.sort_unstable();
                return nodes;
            }
            a -= 1;
            if idx[a] < hi_i[a] {
                idx[a] += 1;
                idx[(a + 1)..n].copy_from_slice(&lo_i[(a + 1)..n]);
                break;
            }
        }
    }
}

/// Time-slice indices inside the half-open window `(tc - r^2/2, tc + r^2/2]`.
fn cube_time_slices<G: Grid>(grid: &G, t_center: f64, r: f64) -> Vec<usize> {
    let nt = grid.time_slices();
    let half = 0.5 * r * r;
    let mut out = Vec::new();
    for k in 0..nt {
        let t = grid.time_coord(k).expect("space-time grid");
        if t > t_center - half && t <= t_center + half {
            out.push(k);
        }
    }
    out
}

/// Flat node indices of `region` on `grid`, ascending.
pub fn region_nodes<G: Grid>(grid: &G, region: &Region) -> Result<Vec<usize>> {
    let nodes = match region {
        Region::Ball { center, r } => {
            if grid.time_slices() != 1 {
                return Err(CzError::GridMismatch(
                    "ball region on a space-time grid; use a parabolic cube".into(),
                ));
            }
            ball_spatial_nodes(grid.space(), center, *r)
        }
        Region::ParabolicCube {
            center,
            t_center,
            r,
        } => {
            if grid.time_step().is_none() {
                return Err(CzError::GridMismatch(
                    "parabolic cube region on a spatial grid; use a ball".into(),
                ));
            }
            let spatial = ball_spatial_nodes(grid.space(), center, *r);
            let slices = cube_time_slices(grid, *t_center, *r);
            let sc = grid.space().node_count();
            let mut out = Vec::with_capacity(spatial.len() * slices.len());
            for &k in &slices {
                for &s in &spatial {
                    out.push(k * sc + s);
                }
            }
            out
        }
    };
    if nodes.is_empty() {
        return Err(CzError::EmptyRegion);
    }
    Ok(nodes)
}

/// Discrete measure of the region: node count times the cell measure.
pub fn region_measure<G: Grid>(grid: &G, region: &Region) -> Result<f64> {
    Ok(region_nodes(grid, region)?.len() as f64 * grid.cell_measure())
}

/// Mean of a scalar field over the nodes of `region`.
pub fn region_average<G: Grid>(w: &ScalarField<G>, region: &Region) -> Result<f64> {
    let nodes = region_nodes(w.grid(), region)?;
    Ok(mean_over(w.values(), &nodes))
}

pub(crate) fn mean_over(values: &[f64], nodes: &[usize]) -> f64 {
    let mut s = 0.0;
    for &i in nodes {
        s += values[i];
    }
    s / nodes.len() as f64
}

/// Componentwise mean of a tensor field over `region` (upper-triangular
/// order, matching `sym_components`).
pub fn region_average_tensor<G: Grid>(w: &SymTensorField<G>, region: &Region) -> Result<Vec<f64>> {
    let nodes = region_nodes(w.grid(), region)?;
    Ok((0..w.component_count())
        .map(|c| mean_over(w.channel(c), &nodes))
        .collect())
}

fn check_order(p: f64) -> Result<()> {
    if p.is_nan() || p < 1.0 {
        return Err(CzError::InvalidOrder { p });
    }
    Ok(())
}

fn lp_from_magnitudes<G: Grid>(
    grid: &G,
    nodes: &[usize],
    p: f64,
    mag: impl Fn(usize) -> f64,
) -> f64 {
    if p.is_infinite() {
        let mut worst = 0.0f64;
        for &i in nodes {
            worst = worst.max(mag(i));
        }
        worst
    } else {
        let mut s = 0.0;
        for &i in nodes {
            s += mag(i).powf(p);
        }
        (s * grid.cell_measure()).powf(1.0 / p)
    }
}

/// Riemann-sum Lp norm of a scalar field over `region`; `p = f64::INFINITY`
/// gives the max norm.
pub fn lp_norm<G: Grid>(w: &ScalarField<G>, region: &Region, p: f64) -> Result<f64> {
    check_order(p)?;
    let nodes = region_nodes(w.grid(), region)?;
    let v = w.values();
    Ok(lp_from_magnitudes(w.grid(), &nodes, p, |i| v[i].abs()))
}

/// Lp norm of a tensor field using the pointwise Frobenius magnitude.
pub fn lp_norm_tensor<G: Grid>(w: &SymTensorField<G>, region: &Region, p: f64) -> Result<f64> {
    check_order(p)?;
    let nodes = region_nodes(w.grid(), region)?;
    Ok(lp_from_magnitudes(w.grid(), &nodes, p, |i| w.frob(i)))
}

/// `integral |w|^p` over the region (no root); the raw quantity of the
/// W^{2,p} estimates.
pub fn lp_integral<G: Grid>(w: &ScalarField<G>, region: &Region, p: f64) -> Result<f64> {
    check_order(p)?;
    let nodes = region_nodes(w.grid(), region)?;
    let v = w.values();
    let mut s = 0.0;
    for &i in &nodes {
        s += v[i].abs().powf(p);
    }
    Ok(s * w.grid().cell_measure())
}

pub fn lp_integral_tensor<G: Grid>(w: &SymTensorField<G>, region: &Region, p: f64) -> Result<f64> {
    check_order(p)?;
    let nodes = region_nodes(w.grid(), region)?;
    let mut s = 0.0;
    for &i in &nodes {
        s += w.frob(i).powf(p);
    }
    Ok(s * w.grid().cell_measure())
}

/// Normalized mean of `|w|^2` over the region (the average, not the integral).
pub fn mean_square<G: Grid>(w: &ScalarField<G>, region: &Region) -> Result<f64> {
    let nodes = region_nodes(w.grid(), region)?;
    let v = w.values();
    let mut s = 0.0;
    for &i in &nodes {
        s += v[i] * v[i];
    }
    Ok(s / nodes.len() as f64)
}

pub fn mean_square_tensor<G: Grid>(w: &SymTensorField<G>, region: &Region) -> Result<f64> {
    let nodes = region_nodes(w.grid(), region)?;
    let comps = sym_components(w.grid().space().n());
    let mut s = 0.0;
    for (c, &pair) in comps.iter().enumerate() {
        let ch = w.channel(c);
        let weight = component_weight(pair);
        let mut sc = 0.0;
        for &i in &nodes {
            sc += ch[i] * ch[i];
        }
        s += weight * sc;
    }
    Ok(s / nodes.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::domain::{Domain, SpaceTimeDomain};

    #[test]
    fn constant_average_is_exact() {
        let d = Domain::unit_lab(2, 33).unwrap();
        let w = ScalarField::constant(d, 4.25).unwrap();
        let avg = region_average(&w, &Region::ball([0.0; 3], 1.0)).unwrap();
        assert_eq!(avg, 4.25);
    }

    #[test]
    fn odd_field_averages_to_zero_on_centered_ball() {
        let d = Domain::unit_lab(2, 33).unwrap();
        let w = ScalarField::from_fn(d, |x| x[0]).unwrap();
        let avg = region_average(&w, &Region::ball([0.0; 3], 1.0)).unwrap();
        assert!(avg.abs() < 1e-13, "odd symmetry: {avg}");
    }

    #[test]
    fn ball_second_moment_matches_closed_form() {
        // continuum: mean of x1^2 over B_r in R^n is r^2/(n+2)
        let d = Domain::unit_lab(2, 129).unwrap();
        let w = ScalarField::from_fn(d, |x| x[0] * x[0]).unwrap();
        let r = 1.0;
        let avg = region_average(&w, &Region::ball([0.0; 3], r)).unwrap();
        let exact = r * r / 4.0;
        assert!(
            (avg - exact).abs() < 3.0 * (4.0f64 / 128.0).powi(2),
            "mean x1^2 = {avg}, exact {exact}"
        );
    }

    #[test]
    fn ball_second_moment_across_dimensions() {
        // mean of x1^2 over B_r in R^n is r^2/(n+2)
        for (n, m) in [(1usize, 513usize), (3, 33)] {
            let d = Domain::unit_lab(n, m).unwrap();
            let w = ScalarField::from_fn(d.clone(), |x| x[0] * x[0]).unwrap();
            let r = 1.0;
            let avg = region_average(&w, &Region::ball([0.0; 3], r)).unwrap();
            let exact = r * r / (n as f64 + 2.0);
            // in 1d the two interval endpoints carry O(h) membership error;
            // higher dimensions average it out around the sphere
            let tol = if n == 1 {
                0.5 * d.h()
            } else {
                5.0 * d.h() * d.h() + 0.05 * d.h()
            };
            assert!(
                (avg - exact).abs() < tol,
                "n = {n}: mean x1^2 = {avg}, exact {exact}, tol {tol}"
            );
        }
    }

    #[test]
    fn empty_region_errors() {
        let d = Domain::unit_lab(2, 16).unwrap();
        let w = ScalarField::constant(d, 1.0).unwrap();
        assert!(matches!(
            region_average(&w, &Region::ball([10.0, 0.0, 0.0], 0.01)),
            Err(CzError::EmptyRegion)
        ));
    }

    #[test]
    fn parabolic_window_is_half_open() {
        // r = 2 gives window (-2, 2] exactly: the right end slice stays in,
        // the left one drops out.
        let st = SpaceTimeDomain::unit_lab(1, 9, 9).unwrap();
        let nodes = region_nodes(&st, &Region::cube([0.0; 3], 0.0, 2.0)).unwrap();
        let times: Vec<f64> = nodes.iter().map(|&f| st.t_coord(st.split(f).0)).collect();
        let tmin = times.iter().cloned().fold(f64::INFINITY, f64::min);
        let tmax = times.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(tmax, 2.0, "right endpoint included");
        assert_eq!(tmin, -1.5, "left endpoint excluded");
    }

    #[test]
    fn l2_norm_matches_average_identity() {
        let d = Domain::unit_lab(2, 33).unwrap();
        let w = ScalarField::from_fn(d.clone(), |x| (3.0 * x[0]).sin() + x[1]).unwrap();
        let reg = Region::ball([0.1, -0.2, 0.0], 0.9);
        let l2 = lp_norm(&w, &reg, 2.0).unwrap();
        let w2 = w.map(|v| v * v).unwrap();
        let identity =
            (region_average(&w2, &reg).unwrap() * region_measure(&d, &reg).unwrap()).sqrt();
        assert!((l2 - identity).abs() <= 1e-12 * l2.max(1.0));
    }

    #[test]
    fn linf_is_max() {
        let d = Domain::unit_lab(1, 17).unwrap();
        let w = ScalarField::from_fn(d, |x| x[0]).unwrap();
        let norm = lp_norm(&w, &Region::ball([0.0; 3], 1.5), f64::INFINITY).unwrap();
        assert!((norm - 1.5).abs() < 1e-12);
    }

    #[test]
    fn invalid_order_rejected() {
        let d = Domain::unit_lab(1, 17).unwrap();
        let w = ScalarField::constant(d, 1.0).unwrap();
        assert!(matches!(
            lp_norm(&w, &Region::ball([0.0; 3], 1.0), 0.5),
            Err(CzError::InvalidOrder { .. })
        ));
    }
}
