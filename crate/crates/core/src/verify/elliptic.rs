//! Elliptic estimate experiments: the p = 2 Hessian/Laplacian identity, the
//! sharp-maximal norm sandwich, the pointwise sharp-maximal bound, the
//! W^{2,p} estimate itself, its p = infinity failure demo, and the duality
//! identity behind the 1 < p < 2 case.

use super::points::{ball_points, snap_to_nodes};
use super::report::{inputs_hash, ratio_or_flag, EstimateReport, GridMeta, Term};
use super::MaximalConfig;
use crate::error::{CzError, Result};
use crate::fields::deriv::{hessian, laplacian};
use crate::fields::domain::{Domain, Grid};
use crate::fields::region::{lp_integral, lp_integral_tensor, lp_norm, lp_norm_tensor, region_nodes, Region};
use crate::fields::scalar::ScalarField;
use crate::fields::tensor::sym_components;
use crate::maximal::{sharp_maximal_2, MaximalField};
use crate::solvers::SolutionPair;

pub(crate) const SUPPORT_TOL: f64 = 1e-12;

/// Evaluation points for the pointwise estimates: continuum points in
/// `B_0.48` snapped to nodes (the same continuum set at every level).
pub const DEFAULT_SAMPLE_POINTS: usize = 25;

pub(crate) fn check_compact_support(v: &ScalarField<Domain>, rings: usize) -> Result<()> {
    let d = v.grid();
    let mut worst = 0.0f64;
    for flat in 0..d.node_count() {
        if d.nodes_to_boundary(d.multi(flat)) < rings {
            worst = worst.max(v.value(flat).abs());
        }
    }
    if worst > SUPPORT_TOL {
        return Err(CzError::NotCompactlySupported { magnitude: worst });
    }
    Ok(())
}

/// `integral |D^2 v|^2 / integral |lap v|^2` over the whole box for a
/// compactly supported `v`; tends to 1 under refinement.
pub fn p2_identity_check(
    v: &ScalarField<Domain>,
    label: &str,
    level: usize,
) -> Result<EstimateReport> {
    check_compact_support(v, 2)?;
    let domain = v.grid().clone();
    let cell = domain.cell_measure();
    let hess = hessian(v)?;
    let lap = laplacian(v)?;
    let mut lhs = 0.0;
    let mut rhs = 0.0;
    for flat in 0..domain.node_count() {
        lhs += hess.frob2(flat);
        let l = lap.value(flat);
        rhs += l * l;
    }
    lhs *= cell;
    rhs *= cell;
    let (ratio, degenerate) = ratio_or_flag(lhs, rhs);
    Ok(EstimateReport {
        experiment: "p2_identity_check".into(),
        label: label.into(),
        grid: GridMeta::of(&domain),
        refinement_level: level,
        p: Some(2.0),
        seed: None,
        points: domain.node_count(),
        lhs,
        rhs_terms: vec![Term::new("lap_sq_integral", rhs)],
        rhs,
        ratio,
        degenerate,
        extra: vec![Term::new("identity_defect", (ratio - 1.0).abs())],
        inputs_hash: inputs_hash(&["p2", label, &domain.m().to_string()]),
    })
}

/// Lp norm of an evaluated maximal field over its points (Riemann sum).
/// Errors if any point had no admissible radius.
pub(crate) fn maximal_lp<G: Grid>(mf: &MaximalField<G>, p: f64) -> Result<f64> {
    let cell = mf.grid().cell_measure();
    let mut s = 0.0;
    for i in 0..mf.len() {
        let v = mf
            .value(i)
            .ok_or(CzError::NoAdmissibleRadius { node: mf.points()[i] })?;
        s += v.powf(p);
    }
    Ok((s * cell).powf(1.0 / p))
}

/// Norm sandwich at `r = 1/2`:
/// `||w||_{L^p(B_r)}` against `||M2# w||^{1/2}_{L^p(B_r)} + ||w||_{L^1(B_r)}`.
/// The lower ratio is `||w||_p / mid`, the upper `mid / ||w||_p`.
pub fn fefferman_stein_report(
    w: &ScalarField<Domain>,
    p: f64,
    cfg: &MaximalConfig,
    label: &str,
    level: usize,
    seed: Option<u64>,
) -> Result<EstimateReport> {
    if !p.is_finite() || p <= 1.0 {
        return Err(CzError::InvalidInput(format!(
            "sandwich requires 1 < p < infinity, got {p}"
        )));
    }
    let domain = w.grid().clone();
    let half_ball = Region::ball([0.0; 3], 0.5);
    let pts = region_nodes(&domain, &half_ball)?;
    let rs = cfg.radius_set(&domain)?;
    let sharp = sharp_maximal_2(w, &pts, &rs, cfg.backend)?;
    let sharp_term = maximal_lp(&sharp, p)?.sqrt();
    let l1_term = lp_norm(w, &half_ball, 1.0)?;
    let wlp = lp_norm(w, &half_ball, p)?;
    let mid = sharp_term + l1_term;
    let (upper, degenerate) = ratio_or_flag(mid, wlp);
    let (lower, _) = ratio_or_flag(wlp, mid);
    Ok(EstimateReport {
        experiment: "fefferman_stein_report".into(),
        label: label.into(),
        grid: GridMeta::of(&domain),
        refinement_level: level,
        p: Some(p),
        seed,
        points: pts.len(),
        lhs: wlp,
        rhs_terms: vec![
            Term::new("sharp_lp_sqrt", sharp_term),
            Term::new("l1", l1_term),
        ],
        rhs: mid,
        ratio: upper,
        degenerate,
        extra: vec![Term::new("lower_ratio", lower), Term::new("upper_ratio", upper)],
        inputs_hash: inputs_hash(&[
            "fs",
            label,
            &p.to_string(),
            &domain.m().to_string(),
            &cfg.backend.to_string(),
        ]),
    })
}

/// Pointwise bound at sample points `x` in `B_1/2`:
/// `M2# D2u(x) <= C (||u||^2_{L2(B1)} + ||f||^2_{L2(B1)} + M2# f(x))`.
/// Reports the worst ratio over the points.
pub fn pointwise_estimate_report(
    pair: &SolutionPair<Domain>,
    point_count: usize,
    cfg: &MaximalConfig,
    label: &str,
    level: usize,
    seed: Option<u64>,
) -> Result<EstimateReport> {
    let domain = pair.u.grid().clone();
    let pts = snap_to_nodes(&domain, &ball_points(domain.n(), 0.48, point_count));
    let rs = cfg.radius_set(&domain)?;
    let hess = hessian(&pair.u)?;
    let sharp_hess = sharp_maximal_2(&hess, &pts, &rs, cfg.backend)?;
    let sharp_f = sharp_maximal_2(&pair.f, &pts, &rs, cfg.backend)?;
    let ball1 = Region::ball([0.0; 3], 1.0);
    let u_sq = lp_norm(&pair.u, &ball1, 2.0)?.powi(2);
    let f_sq = lp_norm(&pair.f, &ball1, 2.0)?.powi(2);

    let mut worst_ratio = 0.0f64;
    let mut worst = (0.0f64, 0.0f64);
    let mut max_lhs = 0.0f64;
    let mut any = false;
    for i in 0..pts.len() {
        let lhs_i = sharp_hess
            .value(i)
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
        experiment: "pointwise_estimate_report".into(),
        label: label.into(),
        grid: GridMeta::of(&domain),
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
            Term::new("max_sharp_hessian", max_lhs),
            Term::new("pair_residual", pair.residual),
        ],
        inputs_hash: inputs_hash(&["pw", label, &domain.m().to_string()]),
    })
}

/// The W^{2,p} estimate itself:
/// `integral_{B_1/2} |D^2 u|^p` against
/// `integral_{B_1} |u|^p + integral_{B_1} |f|^p`.
pub fn cz_elliptic_report(
    pair: &SolutionPair<Domain>,
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
    let domain = pair.u.grid().clone();
    let half = Region::ball([0.0; 3], 0.5);
    let one = Region::ball([0.0; 3], 1.0);
    let hess = hessian(&pair.u)?;
    let lhs = lp_integral_tensor(&hess, &half, p)?;
    let u_term = lp_integral(&pair.u, &one, p)?;
    let f_term = lp_integral(&pair.f, &one, p)?;
    let rhs = u_term + f_term;
    let (ratio, degenerate) = ratio_or_flag(lhs, rhs);
    Ok(EstimateReport {
        experiment: "cz_elliptic_report".into(),
        label: label.into(),
        grid: GridMeta::of(&domain),
        refinement_level: level,
        p: Some(p),
        seed,
        points: 0,
        lhs,
        rhs_terms: vec![Term::new("u_lp", u_term), Term::new("f_lp", f_term)],
        rhs,
        ratio,
        degenerate,
        extra: vec![Term::new("pair_residual", pair.residual)],
        inputs_hash: inputs_hash(&["cz", label, &p.to_string(), &domain.m().to_string()]),
    })
}

/// Why p = infinity fails: for `u = x1 x2 log|x|` the forcing stays bounded
/// (`|f| <= 2`) while `||D^2 u||_inf` grows like `|log h|` under refinement.
/// One report per grid in the ladder; the finite-p ratio (p = 4) rides along
/// and stays stable.
pub fn sharpness_demo_pinf(grids: &[usize], level0: usize) -> Result<Vec<EstimateReport>> {
    let mut out = Vec::with_capacity(grids.len());
    for (i, &m) in grids.iter().enumerate() {
        let domain = Domain::unit_lab(2, m)?;
        let pair = crate::solvers::manufactured_pair(&domain, &crate::solvers::Recipe::LogSaddle)?;
        let half = Region::ball([0.0; 3], 0.5);
        let one = Region::ball([0.0; 3], 1.0);
        let hess = hessian(&pair.u)?;
        let lhs = lp_norm_tensor(&hess, &half, f64::INFINITY)?;
        let f_inf = lp_norm(&pair.f, &one, f64::INFINITY)?;
        let (ratio, degenerate) = ratio_or_flag(lhs, f_inf);
        let p4 = cz_elliptic_report(&pair, 4.0, "logsaddle", level0 + i, None)?;
        out.push(EstimateReport {
            experiment: "sharpness_demo_pinf".into(),
            label: "logsaddle".into(),
            grid: GridMeta::of(&domain),
            refinement_level: level0 + i,
            p: None,
            seed: None,
            points: 0,
            lhs,
            rhs_terms: vec![Term::new("f_inf", f_inf)],
            rhs: f_inf,
            ratio,
            degenerate,
            extra: vec![
                Term::new("p4_ratio", p4.ratio),
                Term::new("f_bound_defect", (f_inf - 2.0).max(0.0)),
            ],
            inputs_hash: inputs_hash(&["sharp_inf", &m.to_string()]),
        });
    }
    Ok(out)
}

/// Duality identity `integral d_ij u * g = integral f * d_ij v` for
/// compactly supported pairs with `f = lap u`, `g = lap v`. Reports the worst
/// relative defect over all (i, j).
pub fn duality_identity_check(
    u_pair: &SolutionPair<Domain>,
    v_pair: &SolutionPair<Domain>,
    label: &str,
    level: usize,
) -> Result<EstimateReport> {
    if u_pair.u.grid() != v_pair.u.grid() {
        return Err(CzError::GridMismatch("pairs live on different grids".into()));
    }
    check_compact_support(&u_pair.u, 2)?;
    check_compact_support(&v_pair.u, 2)?;
    let domain = u_pair.u.grid().clone();
    let cell = domain.cell_measure();
    let hess_u = hessian(&u_pair.u)?;
    let hess_v = hessian(&v_pair.u)?;
    let f = u_pair.f.values();
    let g = v_pair.f.values();
    let comps = sym_components(domain.n());

    let mut max_defect = 0.0f64;
    let mut scale = 0.0f64;
    let mut terms = Vec::with_capacity(comps.len());
    for (c, &(a, b)) in comps.iter().enumerate() {
        let du = hess_u.channel(c);
        let dv = hess_v.channel(c);
        let mut lhs_int = 0.0;
        let mut rhs_int = 0.0;
        for flat in 0..domain.node_count() {
            lhs_int += du[flat] * g[flat];
            rhs_int += f[flat] * dv[flat];
        }
        lhs_int *= cell;
        rhs_int *= cell;
        let defect = (lhs_int - rhs_int).abs();
        max_defect = max_defect.max(defect);
        scale = scale.max(lhs_int.abs()).max(rhs_int.abs());
        terms.push(Term::new(format!("defect_{}{}", a + 1, b + 1), defect));
    }
    let (ratio, degenerate) = ratio_or_flag(max_defect, scale);
    Ok(EstimateReport {
        experiment: "duality_identity_check".into(),
        label: label.into(),
        grid: GridMeta::of(&domain),
        refinement_level: level,
        p: None,
        seed: None,
        points: 0,
        lhs: max_defect,
        rhs_terms: vec![Term::new("scale", scale)],
        rhs: scale,
        ratio,
        degenerate,
        extra: terms,
        inputs_hash: inputs_hash(&["dual", label, &domain.m().to_string()]),
    })
}
