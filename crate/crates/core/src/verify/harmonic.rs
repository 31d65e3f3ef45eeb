//! Harmonic toolbox: the mean value property and the interior growth bound
//! `|D^2 u(x)| <= C R^{-n/2} ||D^2 u||_{L^2(B_R)}` on `B_{R/2}`.

use super::report::{inputs_hash, ratio_or_flag, EstimateReport, GridMeta, Term};
use crate::error::{CzError, Result};
use crate::fields::deriv::{hessian, laplacian};
use crate::fields::domain::Domain;
use crate::fields::region::{lp_norm_tensor, region_average, region_nodes, Region};
use crate::fields::scalar::ScalarField;

/// Discrete-harmonicity gate: max |lap_h u| over the sampled region must not
/// exceed `tol`. Sampled harmonic polynomials of degree <= 3 are exact
/// (tol 1e-8); quartics carry an unavoidable `O(h^2)` stencil constant, so
/// callers pass an `h^2`-scaled tolerance for those.
fn check_harmonic(u: &ScalarField<Domain>, nodes: &[usize], tol: f64) -> Result<()> {
    let lap = laplacian(u)?;
    let mut worst = 0.0f64;
    for &i in nodes {
        worst = worst.max(lap.value(i).abs());
    }
    if worst > tol {
        return Err(CzError::InvalidInput(format!(
            "field is not discretely harmonic: max |lap u| = {worst:.3e} > {tol:.3e}"
        )));
    }
    Ok(())
}

/// Mean value property: `|u(x) - mean_{B_r(x)} u|` at every (center, radius),
/// `O(h^2)` for harmonic inputs. Centers snap to nodes so the ball is
/// node-symmetric.
pub fn mean_value_check(
    u: &ScalarField<Domain>,
    centers: &[[f64; 3]],
    radii: &[f64],
    harmonic_tol: f64,
    label: &str,
    level: usize,
) -> Result<EstimateReport> {
    let domain = u.grid().clone();
    let mut max_defect = 0.0f64;
    let mut sum_defect = 0.0;
    let mut count = 0usize;
    for c in centers {
        let node = domain.flat(domain.nearest_node(&c[..domain.n()]));
        let x = domain.node_coords(node);
        for &r in radii {
            let ball = Region::ball(x, r);
            let nodes = region_nodes(&domain, &ball)?;
            check_harmonic(u, &nodes, harmonic_tol)?;
            let defect = (u.value(node) - region_average(u, &ball)?).abs();
            max_defect = max_defect.max(defect);
            sum_defect += defect;
            count += 1;
        }
    }
    let h2 = domain.h() * domain.h();
    Ok(EstimateReport {
        experiment: "mean_value_check".into(),
        label: label.into(),
        grid: GridMeta::of(&domain),
        refinement_level: level,
        p: None,
        seed: None,
        points: count,
        lhs: max_defect,
        rhs_terms: vec![Term::new("h_squared", h2)],
        rhs: h2,
        ratio: max_defect / h2,
        degenerate: false,
        extra: vec![Term::new("mean_defect", sum_defect / count.max(1) as f64)],
        inputs_hash: inputs_hash(&["mvc", label, &domain.m().to_string()]),
    })
}

/// Growth bound: report, per ladder radius `R`, the smallest constant with
/// `|D^2 u(x)|_F <= C R^{-n/2} ||D^2 u||_{L^2(B_R)}` over the nodes of
/// `B_{R/2}`. For homogeneous harmonics both sides scale identically in `R`,
/// so the per-R constants agree up to discretization.
pub fn growth_bound_check(
    u: &ScalarField<Domain>,
    r_ladder: &[f64],
    harmonic_tol: f64,
    label: &str,
    level: usize,
) -> Result<EstimateReport> {
    let domain = u.grid().clone();
    let n = domain.n();
    let hess = hessian(u)?;
    // affine inputs leave only rounding noise in the discrete Hessian
    let noise_floor = 1e-8 * (1.0 + u.max_abs());
    let mut per_r = Vec::with_capacity(r_ladder.len());
    let mut c_min = f64::INFINITY;
    let mut c_max = 0.0f64;
    let mut degenerate = true;
    for &r in r_ladder {
        let big = Region::ball([0.0; 3], r);
        check_harmonic(u, &region_nodes(&domain, &big)?, harmonic_tol)?;
        let norm = lp_norm_tensor(&hess, &big, 2.0)?;
        let inner_nodes = region_nodes(&domain, &Region::ball([0.0; 3], 0.5 * r))?;
        let mut sup = 0.0f64;
        for &i in &inner_nodes {
            sup = sup.max(hess.frob(i));
        }
        if norm <= noise_floor {
            per_r.push(Term::new(format!("c_at_{r}"), 0.0));
            continue;
        }
        degenerate = false;
        let c = sup * r.powf(n as f64 / 2.0) / norm;
        c_min = c_min.min(c);
        c_max = c_max.max(c);
        per_r.push(Term::new(format!("c_at_{r}"), c));
    }
    let (spread, _) = if degenerate {
        (0.0, true)
    } else {
        ratio_or_flag(c_max - c_min, c_max)
    };
    Ok(EstimateReport {
        experiment: "growth_bound_check".into(),
        label: label.into(),
        grid: GridMeta::of(&domain),
        refinement_level: level,
        p: None,
        seed: None,
        points: r_ladder.len(),
        lhs: if degenerate { 0.0 } else { c_max },
        rhs_terms: vec![Term::new("c_min", if degenerate { 0.0 } else { c_min })],
        rhs: if degenerate { 0.0 } else { c_min },
        ratio: spread,
        degenerate,
        extra: per_r,
        inputs_hash: inputs_hash(&["growth", label, &domain.m().to_string()]),
    })
}
