//! Experiment catalog: names, the estimate each experiment measures, and a
//! one-line summary of what it reports.

use serde::Serialize;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct CatalogEntry {
    pub name: &'static str,
    /// The mathematical statement under test.
    pub anchor: &'static str,
    /// What the experiment measures.
    pub summary: &'static str,
}

pub const CATALOG: &[CatalogEntry] = &[
    CatalogEntry {
        name: "p2_identity_check",
        anchor: "int |D^2 v|^2 = int |lap v|^2 for compactly supported smooth v",
        summary: "ratio of the two integrals for a bump; tends to 1 under refinement",
    },
    CatalogEntry {
        name: "fefferman_stein_report",
        anchor: "c ||w||_Lp(B_r) <= ||M2# w||_Lp(B_r)^(1/2) + ||w||_L1(B_r) <= C ||w||_Lp(B_r), 1 < p < inf",
        summary: "sharp-maximal norm sandwich at r = 1/2; lower/upper ratios over a corpus",
    },
    CatalogEntry {
        name: "pointwise_estimate_report",
        anchor: "M2# D^2u(x) <= C (||u||^2_L2(B1) + ||f||^2_L2(B1) + M2# f(x)) for x in B_1/2, lap u = f",
        summary: "worst pointwise ratio over sample points in the half ball",
    },
    CatalogEntry {
        name: "cz_elliptic_report",
        anchor: "int_{B_1/2} |D^2 u|^p <= C (int_{B_1} |u|^p + int_{B_1} |f|^p), 1 < p < inf, lap u = f",
        summary: "the W^{2,p} ratio for smooth and capped-singular forcings",
    },
    CatalogEntry {
        name: "sharpness_demo_pinf",
        anchor: "p = inf fails: u = x1 x2 log|x| has |f| <= 2 while ||D^2 u||_inf grows like |log h|",
        summary: "infinity-norm ratio across a refinement ladder, with the stable p = 4 ratio alongside",
    },
    CatalogEntry {
        name: "duality_identity_check",
        anchor: "int d_ij(u) g = int f d_ij(v) for compactly supported u, v with lap u = f, lap v = g",
        summary: "worst relative defect over all second-derivative components",
    },
    CatalogEntry {
        name: "theta_profile",
        anchor: "Theta(r) = sup_k sup_{rho >= r} avg_{B_rho} |D^2 u_k - mean|^2, with a near-supremum selection",
        summary: "the oscillation profile: monotone in r, and the (1 - delta) selection inequality",
    },
    CatalogEntry {
        name: "blowup_rescale",
        anchor: "v_m(x) = (u(r_m x) - p_m(x)) / (r_m^2 Theta^(1/2)): unit-ball averages of v, grad v, D^2 v vanish",
        summary: "rescaled pair (v_m, g_m); checks vanishing averages and the (1 - delta) Hessian normalization",
    },
    CatalogEntry {
        name: "pointwise_parabolic_report",
        anchor: "M2#par dt(u) + M2#par D^2u <= C (||u||^2_L2(Q1) + ||f||^2_L2(Q1) + M2#par f) on Q_1/2",
        summary: "worst pointwise ratio over sample points in the half parabolic cube",
    },
    CatalogEntry {
        name: "cz_parabolic_report",
        anchor: "int_{Q_1/2} |D^2 u|^p + |dt u|^p <= C (int_{Q_1} |u|^p + int_{Q_1} |f|^p), u_t - lap u = f",
        summary: "the parabolic W^{2,p} ratio for smooth and capped-singular forcings",
    },
    CatalogEntry {
        name: "parabolic_duality_check",
        anchor: "int dt(u) g~ = -int f dt(v~) with g~, v~ time-reversed, zero initial data",
        summary: "time-reversal duality defect; contracts at second order in (h, tau)",
    },
    CatalogEntry {
        name: "poly_growth_check",
        anchor: "avg_{Q_R} |p - c_R|^2 >= c R^{2N} for polynomials of parabolic degree N",
        summary: "fitted growth exponent of the centered oscillation over a radius ladder",
    },
    CatalogEntry {
        name: "mean_value_check",
        anchor: "harmonic u: u(x) = avg_{B_r(x)} u",
        summary: "mean-value defects at sampled centers and radii; O(h^2) for harmonic inputs",
    },
    CatalogEntry {
        name: "growth_bound_check",
        anchor: "harmonic u: |D^2 u(x)| <= C R^(-n/2) ||D^2 u||_L2(B_R) for x in B_{R/2}",
        summary: "smallest working constant per ladder radius; stable for homogeneous harmonics",
    },
];

pub fn entry(name: &str) -> Option<&'static CatalogEntry> {
    CATALOG.iter().find(|e| e.name == name)
}

pub fn render_text() -> String {
    let mut out = String::from("available experiments:\n");
    for e in CATALOG {
        out.push_str(&format!("  {}\n      {}\n      {}\n", e.name, e.anchor, e.summary));
    }
    out
}
