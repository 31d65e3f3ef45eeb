//! Parabolic estimate experiments: the pointwise parabolic sharp-maximal
//! bound, the parabolic W^{2,p} estimate, and the time-reversal duality
//! identity behind its 1 < p < 2 case.

use super::points::cube_points;
use super::report::{inputs_hash, ratio_or_flag, EstimateReport, GridMeta, Term};
use super::MaximalConfig;
use crate::error::{CzError, Result};
use crate::fields::deriv::{dt, hessian};
use crate::fields::domain::{Grid, SpaceTimeDomain};
use crate::fields::region::{lp_integral, lp_integral_tensor, lp_norm, Region};
use crate::maximal::sharp_maximal_2_parabolic;
use crate::solvers::SolutionPair;

/// Pointwise bound at sample points `(x, t)` in `Q_1/2`:
/// `M2#par dt_u + M2#par D2u <= C (||u||^2_{L2(Q1)} + ||f||^2_{L2(Q1)} + M2#par f)`.
pub fn pointwise_parabolic_report(
    pair: &SolutionPair<SpaceTimeDomain>,
    point_count: usize,
    cfg: &MaximalConfig,
    label: &str,
    level: usize,
    seed: Option<u64>,
) -> Result<EstimateReport> {
    let grid = pair.u.grid().clone();
    let pts = cube_points(&grid, 0.5, point_count);
    let rs = cfg.radius_set(grid.space())?;
    let du_t = dt(&pair.u)?;
    let hess = hessian(&pair.u)?;
    let sharp_dt = sharp_maximal_2_parabolic(&du_t, &pts, &rs, cfg.backend)?;
    let sharp_hess = sharp_maximal_2_parabolic(&hess, &pts, &rs, cfg.backend)?;
    let sharp_f = sharp_maximal_2_parabolic(&pair.f, &pts, &rs, cfg.backend)?;
    let q1 = Region::cube([0.0; 3], 0.0, 1.0);
    let u_sq = lp_norm(&pair.u, &q1, 2.0)?.powi(2);
    let f_sq = lp_norm(&pair.f, &q1, 2.0)?.powi(2);

    let mut worst_ratio = 0.0f64;
    let mut worst = (0.0f64, 0.0f64);
    let mut max_lhs = 0.0f64;
    let mut any = false;
    for i in 0..pts.len() {
        let lhs_i = sharp_dt
            .value(i)
            .zip(sharp_hess.value(i))
            .map(|(a, b)| a + b)
            .ok_or(CzError::NoAdmissibleRadius { node: pts[i] })?;
        let mf_i = sharp_f
            .value(i)
            .ok_or(CzError::NoAdmissibleRadius { node: pts[i] })?;
        let rhs_i = u_sq + f_sq + mf_i;
        max_lhs = max_lhs.max(lhs_i);
        let (ratio_i, flagged) = ratio_or_flag(lhs_i, rhs_i);
        if !flagged && (!any || ratio_i > worst_ratio) {
            worst_ratio = ratio_i;
            worst = (lhs_i, rhs_i);
            any = true;
        }
    }
    let degenerate = !any;
    Ok(EstimateReport {
        experiment: "pointwise_parabolic_report".into(),
        label: label.into(),
        grid: GridMeta::of(&grid),
        refinement_level: level,
        p: None,
        seed,
        points: pts.len(),
        lhs: worst.0,
        rhs_terms: vec![
            Term::new("u_l2_sq", u_sq),
            Term::new("f_l2_sq", f_sq),
            Term::new("sharp_f_at_worst", worst.1 - u_sq - f_sq),
        ],
        rhs: worst.1,
        ratio: worst_ratio,
        degenerate,
        extra: vec![
            Term::new("max_sharp_sum", max_lhs),
            Term::new("pair_residual", pair.residual),
        ],
        inputs_hash: inputs_hash(&[
            "pwpar",
            label,
            &grid.space().m().to_string(),
            &grid.nt().to_string(),
        ]),
    })
}

/// The parabolic W^{2,p} estimate:
/// `integral_{Q_1/2} |D^2 u|^p + |dt u|^p` against
/// `integral_{Q_1} |u|^p + |f|^p`.
pub fn cz_parabolic_report(
    pair: &SolutionPair<SpaceTimeDomain>,
    p: f64,
    label: &str,
    level: usize,
    seed: Option<u64>,
) -> Result<EstimateReport> {
    if !p.is_finite() || p <= 1.0 {
        return Err(CzError::InvalidInput(format!(
            "W^{{2,p}} estimate requires 1 < p < infinity, got {p}"
        )));
    }
    let grid = pair.u.grid().clone();
    let half = Region::cube([0.0; 3], 0.0, 0.5);
    let one = Region::cube([0.0; 3], 0.0, 1.0);
    let hess = hessian(&pair.u)?;
    let du_t = dt(&pair.u)?;
    let hess_term = lp_integral_tensor(&hess, &half, p)?;
    let dt_term = lp_integral(&du_t, &half, p)?;
    let lhs = hess_term + dt_term;
    let u_term = lp_integral(&pair.u, &one, p)?;
    let f_term = lp_integral(&pair.f, &one, p)?;
    let rhs = u_term + f_term;
    let (ratio, degenerate) = ratio_or_flag(lhs, rhs);
    Ok(EstimateReport {
        experiment: "cz_parabolic_report".into(),
        label: label.into(),
        grid: GridMeta::of(&grid),
        refinement_level: level,
        p: Some(p),
        seed,
        points: 0,
        lhs,
        rhs_terms: vec![Term::new("u_lp", u_term), Term::new("f_lp", f_term)],
        rhs,
        ratio,
        degenerate,
        extra: vec![
            Term::new("hessian_lp", hess_term),
            Term::new("dt_lp", dt_term),
            Term::new("pair_residual", pair.residual),
        ],
        inputs_hash: inputs_hash(&[
            "czpar",
            label,
            &p.to_string(),
            &grid.space().m().to_string(),
            &grid.nt().to_string(),
        ]),
    })
}

const INITIAL_TOL: f64 = 1e-12;

/// Time-reversal duality on `Omega = box x (0, 1)`:
/// `integral dt_u * g~ = -integral f * dt_v~` for pairs with zero initial
/// data and compact spatial support, with `g~, v~` time-reversed. Time
/// integrals use trapezoidal weights so the defect is `O(tau^2 + h^2)`.
pub fn parabolic_duality_check(
    u_pair: &SolutionPair<SpaceTimeDomain>,
    v_pair: &SolutionPair<SpaceTimeDomain>,
    label: &str,
    level: usize,
) -> Result<EstimateReport> {
    if u_pair.u.grid() != v_pair.u.grid() {
        return Err(CzError::GridMismatch("pairs live on different grids".into()));
    }
    let grid = u_pair.u.grid().clone();
    for (name, field) in [("u", &u_pair.u), ("v", &v_pair.u)] {
        let first = field.slice(0);
        let worst = first.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if worst > INITIAL_TOL {
            return Err(CzError::InvalidInput(format!(
                "{name} has nonzero initial data (max {worst:.3e})"
            )));
        }
        // compact spatial support: two boundary rings must vanish on all slices
        let space = grid.space();
        let mut ring = 0.0f64;
        for flat in 0..grid.node_count() {
            let s = grid.spatial_index(flat);
            if space.nodes_to_boundary(space.multi(s)) < 2 {
                ring = ring.max(field.value(flat).abs());
            }
        }
        if ring > super::elliptic::SUPPORT_TOL {
            return Err(CzError::NotCompactlySupported { magnitude: ring });
        }
    }

    let du_t = dt(&u_pair.u)?;
    let g_rev = v_pair.f.time_reversed();
    let dv_rev = dt(&v_pair.u.time_reversed())?;
    let f = u_pair.f.values();

    let sc = grid.space().node_count();
    let nt = grid.nt();
    let cell = grid.space().cell_measure();
    let tau = grid.tau();
    let mut forward = 0.0;
    let mut backward = 0.0;
    for k in 0..nt {
        let wt = if k == 0 || k == nt - 1 { 0.5 * tau } else { tau };
        let mut slice_fwd = 0.0;
        let mut slice_bwd = 0.0;
        for s in 0..sc {
            let flat = k * sc + s;
            slice_fwd += du_t.value(flat) * g_rev.value(flat);
            slice_bwd += f[flat] * dv_rev.value(flat);
        }
        forward += wt * slice_fwd * cell;
        backward += wt * slice_bwd * cell;
    }
    // identity: forward = -backward
    let defect = (forward + backward).abs();
    let scale = forward.abs().max(backward.abs());
    let (ratio, degenerate) = ratio_or_flag(defect, scale);
    Ok(EstimateReport {
        experiment: "parabolic_duality_check".into(),
        label: label.into(),
        grid: GridMeta::of(&grid),
        refinement_level: level,
        p: None,
        seed: None,
        points: 0,
        lhs: defect,
        rhs_terms: vec![Term::new("scale", scale)],
        rhs: scale,
        ratio,
        degenerate,
        extra: vec![
            Term::new("forward_integral", forward),
            Term::new("backward_integral", backward),
        ],
        inputs_hash: inputs_hash(&[
            "dualpar",
            label,
            &grid.space().m().to_string(),
            &grid.nt().to_string(),
        ]),
    })
}
