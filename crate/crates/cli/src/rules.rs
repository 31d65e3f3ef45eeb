//! Pass/fail rules: the acceptance thresholds applied to the report rows of
//! each experiment. The summary mirrors these verdicts one to one.

use czlab_core::verify::thresholds as th;
use czlab_core::verify::EstimateReport;

#[derive(Clone, Debug)]
pub struct RuleResult {
    pub experiment: String,
    pub rule: String,
    pub pass: bool,
    pub detail: String,
}

impl RuleResult {
    fn new(experiment: &str, rule: impl Into<String>, pass: bool, detail: String) -> Self {
        Self {
            experiment: experiment.into(),
            rule: rule.into(),
            pass,
            detail,
        }
    }
}

fn levels(reports: &[&EstimateReport]) -> Vec<usize> {
    let mut ls: Vec<usize> = reports.iter().map(|r| r.refinement_level).collect();
    ls.sort_unstable();
    ls.dedup();
    ls
}

/// Evaluate every rule for one experiment's rows.
pub fn evaluate(name: &str, rows: &[EstimateReport]) -> Vec<RuleResult> {
    let rows: Vec<&EstimateReport> = rows.iter().filter(|r| r.experiment == name).collect();
    if rows.is_empty() {
        return Vec::new();
    }
    match name {
        "p2_identity_check" => p2_rules(&rows),
        "fefferman_stein_report" => fs_rules(&rows),
        "pointwise_estimate_report" => pointwise_rules(&rows, "pointwise_estimate_report"),
        "pointwise_parabolic_report" => pointwise_rules(&rows, "pointwise_parabolic_report"),
        "cz_elliptic_report" => cz_rules(&rows, "cz_elliptic_report"),
        "cz_parabolic_report" => cz_rules(&rows, "cz_parabolic_report"),
        "sharpness_demo_pinf" => sharpness_rules(&rows),
        "duality_identity_check" => duality_rules(&rows, "duality_identity_check"),
        "parabolic_duality_check" => duality_rules(&rows, "parabolic_duality_check"),
        "theta_profile" => theta_rules(&rows),
        "blowup_rescale" => blowup_rules(&rows),
        "poly_growth_check" => poly_rules(&rows),
        "mean_value_check" => mvc_rules(&rows),
        "growth_bound_check" => growth_rules(&rows),
        _ => Vec::new(),
    }
}

fn p2_rules(rows: &[&EstimateReport]) -> Vec<RuleResult> {
    let name = "p2_identity_check";
    let mut out = Vec::new();
    let mut defects: Vec<(usize, f64)> = Vec::new();
    for r in rows {
        if r.degenerate {
            continue;
        }
        let defect = (r.ratio - 1.0).abs();
        defects.push((r.grid.m, defect));
        let tol = if r.grid.m >= 256 {
            Some(th::P2_TOL_AT_256)
        } else if r.grid.m >= 128 {
            Some(th::P2_TOL_AT_128)
        } else {
            None
        };
        if let Some(tol) = tol {
            out.push(RuleResult::new(
                name,
                format!("|ratio - 1| at {}", r.grid.describe()),
                defect <= tol,
                format!("defect {defect:.3e} <= {tol:.0e}"),
            ));
        }
    }
    if let (Some(c), Some(f)) = (
        defects.iter().find(|(m, _)| *m == 128),
        defects.iter().find(|(m, _)| *m == 256),
    ) {
        let rate = c.1 / f.1;
        let (lo, hi) = th::P2_CONTRACTION;
        out.push(RuleResult::new(
            name,
            "defect contraction 128 -> 256",
            (lo..=hi).contains(&rate),
            format!("rate {rate:.2} in [{lo}, {hi}]"),
        ));
    }
    out
}

fn fs_rules(rows: &[&EstimateReport]) -> Vec<RuleResult> {
    let name = "fefferman_stein_report";
    let mut out = Vec::new();
    let mut ps: Vec<f64> = rows.iter().filter_map(|r| r.p).collect();
    ps.sort_by(f64::total_cmp);
    ps.dedup();
    for &p in &ps {
        let mut per_level: Vec<(f64, f64)> = Vec::new(); // (min lower, max upper)
        for level in levels(rows) {
            let group: Vec<&&EstimateReport> = rows
                .iter()
                .filter(|r| r.p == Some(p) && r.refinement_level == level)
                .collect();
            if group.is_empty() {
                continue;
            }
            let min_lower = group
                .iter()
                .filter_map(|r| r.extra_value("lower_ratio"))
                .fold(f64::INFINITY, f64::min);
            let max_upper = group
                .iter()
                .filter_map(|r| r.extra_value("upper_ratio"))
                .fold(0.0f64, f64::max);
            per_level.push((min_lower, max_upper));
        }
        let finite = per_level
            .iter()
            .all(|(lo, up)| *lo > 0.0 && lo.is_finite() && up.is_finite());
        out.push(RuleResult::new(
            name,
            format!("sandwich finite at p = {p}"),
            finite,
            format!("per-level (min lower, max upper): {per_level:?}"),
        ));
        for w in per_level.windows(2) {
            let d_lower = th::drift(w[0].0, w[1].0);
            let d_upper = th::drift(w[0].1, w[1].1);
            out.push(RuleResult::new(
                name,
                format!("ratio drift at p = {p}"),
                d_lower <= th::FS_DRIFT && d_upper <= th::FS_DRIFT,
                format!(
                    "lower drift {d_lower:.3}, upper drift {d_upper:.3} <= {}",
                    th::FS_DRIFT
                ),
            ));
        }
    }
    out
}

fn pointwise_rules(rows: &[&EstimateReport], name: &str) -> Vec<RuleResult> {
    let mut out = Vec::new();
    for r in rows.iter().filter(|r| !r.label.starts_with("corpus")) {
        out.push(RuleResult::new(
            name,
            format!("trivial case '{}' vanishes at level {}", r.label, r.refinement_level),
            r.ratio <= th::POINTWISE_TRIVIAL_TOL,
            format!("ratio {:.3e} <= {:.0e}", r.ratio, th::POINTWISE_TRIVIAL_TOL),
        ));
    }
    let mut per_level: Vec<f64> = Vec::new();
    for level in levels(rows) {
        let max_ratio = rows
            .iter()
            .filter(|r| r.label.starts_with("corpus") && r.refinement_level == level)
            .map(|r| r.ratio)
            .fold(0.0f64, f64::max);
        per_level.push(max_ratio);
    }
    for w in per_level.windows(2) {
        let d = th::drift(w[0], w[1]);
        out.push(RuleResult::new(
            name,
            "corpus max-ratio drift",
            d <= th::POINTWISE_DRIFT,
            format!("{:.4} -> {:.4}, drift {d:.3} <= {}", w[0], w[1], th::POINTWISE_DRIFT),
        ));
    }
    out
}

fn cz_rules(rows: &[&EstimateReport], name: &str) -> Vec<RuleResult> {
    let mut out = Vec::new();
    let mut keys: Vec<(String, u64)> = rows
        .iter()
        .map(|r| (r.label.clone(), r.p.unwrap_or(0.0).to_bits()))
        .collect();
    keys.sort();
    keys.dedup();
    for (label, pbits) in keys {
        let p = f64::from_bits(pbits);
        let series: Vec<&&EstimateReport> = rows
            .iter()
            .filter(|r| r.label == label && r.p == Some(p))
            .collect();
        let finite = series.iter().all(|r| r.ratio.is_finite() && r.ratio >= 0.0);
        out.push(RuleResult::new(
            name,
            format!("ratio finite ({label}, p = {p})"),
            finite,
            format!(
                "ratios {:?}",
                series.iter().map(|r| r.ratio).collect::<Vec<_>>()
            ),
        ));
        let mut sorted = series.clone();
        sorted.sort_by_key(|r| r.refinement_level);
        for w in sorted.windows(2) {
            let d = th::drift(w[0].ratio, w[1].ratio);
            out.push(RuleResult::new(
                name,
                format!("ratio drift ({label}, p = {p})"),
                d <= th::CZ_DRIFT,
                format!(
                    "{:.4} -> {:.4}, drift {d:.3} <= {}",
                    w[0].ratio, w[1].ratio, th::CZ_DRIFT
                ),
            ));
        }
    }
    out
}

fn sharpness_rules(rows: &[&EstimateReport]) -> Vec<RuleResult> {
    let name = "sharpness_demo_pinf";
    let mut sorted: Vec<&&EstimateReport> = rows.iter().collect();
    sorted.sort_by_key(|r| r.refinement_level);
    let mut out = Vec::new();
    let mut growing = true;
    for w in sorted.windows(2) {
        growing &= w[1].ratio > w[0].ratio;
    }
    out.push(RuleResult::new(
        name,
        "infinity-norm ratio strictly increasing",
        growing && sorted.len() >= 2,
        format!(
            "ratios {:?}",
            sorted.iter().map(|r| r.ratio).collect::<Vec<_>>()
        ),
    ));
    let p4: Vec<f64> = sorted
        .iter()
        .filter_map(|r| r.extra_value("p4_ratio"))
        .collect();
    // same drift metric as every other stability rule: consecutive levels
    let worst_step = p4
        .windows(2)
        .map(|w| th::drift(w[0], w[1]))
        .fold(0.0f64, f64::max);
    out.push(RuleResult::new(
        name,
        "p = 4 ratio refinement-stable",
        worst_step <= th::SHARPNESS_P4_BAND && !p4.is_empty(),
        format!(
            "per-level {p4:?}, worst step drift {worst_step:.3} <= {}",
            th::SHARPNESS_P4_BAND
        ),
    ));
    let f_ok = sorted
        .iter()
        .all(|r| r.extra_value("f_bound_defect").unwrap_or(1.0) <= 1e-6);
    out.push(RuleResult::new(
        name,
        "forcing bounded by 2",
        f_ok,
        "max(|f|) - 2 <= 1e-6 at every level".into(),
    ));
    out
}

fn duality_rules(rows: &[&EstimateReport], name: &str) -> Vec<RuleResult> {
    let mut out = Vec::new();
    for r in rows.iter().filter(|r| r.label == "symmetric") {
        out.push(RuleResult::new(
            name,
            format!("symmetric defect at level {}", r.refinement_level),
            r.ratio <= th::DUALITY_SYMMETRIC_TOL,
            format!("defect {:.3e} <= {:.0e}", r.ratio, th::DUALITY_SYMMETRIC_TOL),
        ));
    }
    let mut distinct: Vec<&&EstimateReport> =
        rows.iter().filter(|r| r.label == "distinct").collect();
    distinct.sort_by_key(|r| r.refinement_level);
    for w in distinct.windows(2) {
        let rate = w[0].ratio / w[1].ratio;
        let (lo, hi) = th::DUALITY_CONTRACTION;
        out.push(RuleResult::new(
            name,
            "defect contraction",
            (lo..=hi).contains(&rate),
            format!("rate {rate:.3} in [{lo}, {hi}]"),
        ));
    }
    out
}

fn theta_rules(rows: &[&EstimateReport]) -> Vec<RuleResult> {
    let name = "theta_profile";
    let mut out = Vec::new();
    for r in rows {
        let mono = r.extra_value("monotone_violation").unwrap_or(f64::INFINITY);
        out.push(RuleResult::new(
            name,
            "Theta nonincreasing in r",
            mono <= 1e-12,
            format!("worst increase {mono:.3e}"),
        ));
        let margin = r.extra_value("selection_margin").unwrap_or(f64::NEG_INFINITY);
        out.push(RuleResult::new(
            name,
            "selection inequality holds",
            margin >= -1e-12 * r.lhs.abs().max(1.0),
            format!("margin {margin:.3e}"),
        ));
    }
    out
}

fn blowup_rules(rows: &[&EstimateReport]) -> Vec<RuleResult> {
    let name = "blowup_rescale";
    let mut out = Vec::new();
    let active: Vec<&&EstimateReport> = rows.iter().filter(|r| !r.degenerate).collect();
    let worst_avg = active
        .iter()
        .filter_map(|r| r.extra_value("avg_defect"))
        .fold(0.0f64, f64::max);
    out.push(RuleResult::new(
        name,
        "vanishing averages",
        worst_avg <= th::BLOWUP_AVG_TOL && !active.is_empty(),
        format!(
            "worst |average| {worst_avg:.3e} <= {:.0e} over {} inputs",
            th::BLOWUP_AVG_TOL,
            active.len()
        ),
    ));
    let (lo, hi) = th::BLOWUP_HALF_WINDOW;
    let in_window = active.iter().all(|r| (lo..=hi).contains(&r.lhs));
    let span = (
        active.iter().map(|r| r.lhs).fold(f64::INFINITY, f64::min),
        active.iter().map(|r| r.lhs).fold(0.0f64, f64::max),
    );
    out.push(RuleResult::new(
        name,
        "normalized Hessian mean-square in window",
        in_window && !active.is_empty(),
        format!("values in [{:.4}, {:.4}], window [{lo}, {hi}]", span.0, span.1),
    ));
    out
}

fn poly_rules(rows: &[&EstimateReport]) -> Vec<RuleResult> {
    let name = "poly_growth_check";
    let mut out = Vec::new();
    let mut worst = 0.0f64;
    let mut worst_label = String::new();
    for r in rows.iter().filter(|r| !r.degenerate) {
        let err = (r.lhs - r.rhs).abs();
        if err > worst {
            worst = err;
            worst_label = r.label.clone();
        }
        if let Some(target) = r.extra_value("t_constant_target") {
            let c = r.extra_value("fitted_constant").unwrap_or(f64::NAN);
            out.push(RuleResult::new(
                name,
                "time-monomial constant",
                (c - target).abs() <= th::POLY_T_CONSTANT_RTOL * target,
                format!("fitted {c:.6}, target {target:.6} (tol {}%)", th::POLY_T_CONSTANT_RTOL * 100.0),
            ));
        }
    }
    out.push(RuleResult::new(
        name,
        "fitted exponents match 2N",
        worst <= th::POLY_EXPONENT_TOL,
        format!("worst |sigma - 2N| = {worst:.4} <= {} ({worst_label})", th::POLY_EXPONENT_TOL),
    ));
    let degenerate_flagged = rows
        .iter()
        .filter(|r| r.label.contains("x^[0, 0, 0]t^0"))
        .all(|r| r.degenerate);
    out.push(RuleResult::new(
        name,
        "constant polynomial degenerate-flagged",
        degenerate_flagged,
        "zero oscillation carries the explicit flag".into(),
    ));
    out
}

fn mvc_rules(rows: &[&EstimateReport]) -> Vec<RuleResult> {
    let name = "mean_value_check";
    let mut out = Vec::new();
    for r in rows.iter().filter(|r| r.label == "x1") {
        out.push(RuleResult::new(
            name,
            format!("odd-symmetric defect at level {}", r.refinement_level),
            r.lhs <= 1e-12,
            format!("defect {:.3e} <= 1e-12", r.lhs),
        ));
    }
    let mut labels: Vec<String> = rows.iter().map(|r| r.label.clone()).collect();
    labels.sort();
    labels.dedup();
    for label in labels.iter().filter(|l| l.as_str() != "x1") {
        let mut series: Vec<&&EstimateReport> =
            rows.iter().filter(|r| &r.label == label).collect();
        series.sort_by_key(|r| r.refinement_level);
        for w in series.windows(2) {
            let (c, f) = (w[0], w[1]);
            if c.lhs <= th::MVC_FLOOR {
                continue;
            }
            let bound = th::MVC_SCALING_SLACK * c.lhs * (f.grid.h / c.grid.h).powi(2)
                + th::MVC_FLOOR;
            out.push(RuleResult::new(
                name,
                format!("O(h^2) scaling ({label})"),
                f.lhs <= bound,
                format!("defect {:.3e} <= {bound:.3e}", f.lhs),
            ));
        }
    }
    out
}

fn growth_rules(rows: &[&EstimateReport]) -> Vec<RuleResult> {
    let name = "growth_bound_check";
    let mut out = Vec::new();
    for r in rows {
        if r.label == "affine" {
            out.push(RuleResult::new(
                name,
                "affine input degenerate-flagged",
                r.degenerate,
                "zero Hessian on both sides".into(),
            ));
        } else {
            out.push(RuleResult::new(
                name,
                format!("constant stable across R ({})", r.label),
                !r.degenerate && r.ratio <= th::GROWTH_SPREAD,
                format!("relative spread {:.4} <= {}", r.ratio, th::GROWTH_SPREAD),
            ));
        }
    }
    out
}
