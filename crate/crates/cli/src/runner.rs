//! Experiment drivers: build the inputs, run the measurements across the
//! refinement ladder, and collect reports. Drivers run in parallel with
//! ordered collection, so outputs are byte-stable across thread counts.

use rayon::prelude::*;

use czlab_core::error::CzError;
use czlab_core::fields::deriv::hessian;
use czlab_core::fields::domain::{Domain, SpaceTimeDomain};
use czlab_core::fields::scalar::ScalarField;
use czlab_core::maximal::RadiusSet;
use czlab_core::solvers::{
    capped_radial_power, corpus, corpus_pairs, corpus_pairs_xt, manufactured_heat_pair,
    manufactured_pair, solve_heat, solve_poisson, HeatRecipe, Recipe,
};
use czlab_core::verify::{
    blowup_rescale, cz_elliptic_report, cz_parabolic_report, duality_identity_check,
    fefferman_stein_report, growth_bound_check, mean_value_check, p2_identity_check,
    parabolic_duality_check, pointwise_estimate_report, pointwise_parabolic_report,
    poly_growth_check, sharpness_demo_pinf, theta_profile, EstimateReport, GridMeta,
    MaximalConfig, MonomialXt, PolyXt, Term, DEFAULT_DELTA, DEFAULT_SAMPLE_POINTS,
};

use crate::config::{ExperimentConfig, RunConfig};

#[derive(Debug)]
pub enum RunError {
    Core(CzError),
    Io(std::io::Error),
    Config(String),
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Core(e) => write!(f, "{e}"),
            RunError::Io(e) => write!(f, "i/o error: {e}"),
            RunError::Config(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for RunError {}

impl From<CzError> for RunError {
    fn from(e: CzError) -> Self {
        match e {
            CzError::Io(io) => RunError::Io(io),
            other => RunError::Core(other),
        }
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Io(e)
    }
}

type DriverResult = Result<Vec<EstimateReport>, RunError>;

fn maximal_config(cfg: &RunConfig) -> MaximalConfig {
    MaximalConfig {
        backend: cfg.backend().expect("validated"),
        ladder: cfg.ladder_kind().expect("validated"),
    }
}

fn spatial_grids(cfg: &RunConfig, exp: &ExperimentConfig) -> Vec<usize> {
    exp.grids.clone().unwrap_or_else(|| cfg.grids.clone())
}

fn parabolic_grids(cfg: &RunConfig, exp: &ExperimentConfig) -> Vec<[usize; 2]> {
    exp.parabolic_grids
        .clone()
        .unwrap_or_else(|| cfg.parabolic_grids.clone())
}

fn p_list(exp: &ExperimentConfig, default: &[f64]) -> Vec<f64> {
    exp.p.clone().unwrap_or_else(|| default.to_vec())
}

/// Run one named experiment, producing its report rows.
pub fn run_experiment(cfg: &RunConfig, exp: &ExperimentConfig) -> DriverResult {
    match exp.name.as_str() {
        "p2_identity_check" => p2_driver(cfg, exp),
        "fefferman_stein_report" => fs_driver(cfg, exp),
        "pointwise_estimate_report" => pointwise_driver(cfg, exp),
        "cz_elliptic_report" => cz_elliptic_driver(cfg, exp),
        "sharpness_demo_pinf" => sharpness_driver(cfg, exp),
        "duality_identity_check" => duality_driver(cfg, exp),
        "theta_profile" => theta_driver(cfg, exp),
        "blowup_rescale" => blowup_driver(cfg, exp),
        "pointwise_parabolic_report" => pointwise_parabolic_driver(cfg, exp),
        "cz_parabolic_report" => cz_parabolic_driver(cfg, exp),
        "parabolic_duality_check" => parabolic_duality_driver(cfg, exp),
        "poly_growth_check" => poly_growth_driver(cfg, exp),
        "mean_value_check" => mean_value_driver(cfg, exp),
        "growth_bound_check" => growth_bound_driver(cfg, exp),
        other => Err(RunError::Config(format!("unknown experiment '{other}'"))),
    }
}

fn p2_driver(cfg: &RunConfig, exp: &ExperimentConfig) -> DriverResult {
    let grids = exp.grids.clone().unwrap_or_else(|| vec![128, 256]);
    let recipe = match &exp.recipe {
        Some(s) => Recipe::parse(s)?,
        None => Recipe::Bump {
            power: 4,
            radius: 1.0,
            center: [0.0; 3],
            amplitude: 1.0,
        },
    };
    let mut out = Vec::new();
    for (level, &m) in grids.iter().enumerate() {
        let d = Domain::unit_lab(cfg.dimension, m)?;
        let v = recipe.sample_u(&d)?;
        out.push(p2_identity_check(&v, &recipe.describe(), level)?);
    }
    Ok(out)
}

fn fs_driver(cfg: &RunConfig, exp: &ExperimentConfig) -> DriverResult {
    let grids = spatial_grids(cfg, exp);
    let ps = p_list(exp, &[1.5, 2.0, 3.0, 4.0]);
    let mcfg = maximal_config(cfg);
    let spec = cfg.corpus_spec();
    let funcs = corpus(&spec, cfg.dimension);
    let mut out = Vec::new();
    for (level, &m) in grids.iter().enumerate() {
        let d = Domain::unit_lab(cfg.dimension, m)?;
        let n = cfg.dimension;
        let fields: Vec<ScalarField<Domain>> = funcs
            .par_iter()
            .map(|f| ScalarField::from_fn(d.clone(), |x| f.eval(n, x)))
            .collect::<Result<_, _>>()?;
        for &p in &ps {
            let rows: Vec<EstimateReport> = fields
                .par_iter()
                .enumerate()
                .map(|(i, w)| {
                    fefferman_stein_report(
                        w,
                        p,
                        &mcfg,
                        &format!("corpus-{i:02}"),
                        level,
                        Some(spec.seed),
                    )
                })
                .collect::<Result<_, _>>()?;
            out.extend(rows);
        }
    }
    Ok(out)
}

fn pointwise_driver(cfg: &RunConfig, exp: &ExperimentConfig) -> DriverResult {
    let grids = spatial_grids(cfg, exp);
    let points = exp.points.unwrap_or(DEFAULT_SAMPLE_POINTS);
    let mcfg = maximal_config(cfg);
    let spec = cfg.corpus_spec();
    let mut out = Vec::new();
    for (level, &m) in grids.iter().enumerate() {
        let d = Domain::unit_lab(cfg.dimension, m)?;
        for (label, recipe) in [
            ("quadratic", Recipe::QuadraticRadial),
            ("harmonic", Recipe::HarmonicSaddle),
        ] {
            if label == "harmonic" && cfg.dimension < 2 {
                continue;
            }
            let pair = manufactured_pair(&d, &recipe)?;
            out.push(pointwise_estimate_report(
                &pair, points, &mcfg, label, level, None,
            )?);
        }
        let pairs = corpus_pairs(&spec, &d)?;
        let rows: Vec<EstimateReport> = pairs
            .par_iter()
            .enumerate()
            .map(|(i, pair)| {
                pointwise_estimate_report(
                    pair,
                    points,
                    &mcfg,
                    &format!("corpus-{i:02}"),
                    level,
                    Some(spec.seed),
                )
            })
            .collect::<Result<_, _>>()?;
        out.extend(rows);
    }
    Ok(out)
}

fn singular_beta(n: usize, p_max: f64) -> f64 {
    // keep beta p < n with margin so |x|^-beta stays p-integrable
    (0.5f64).min(0.9 * n as f64 / p_max)
}

fn cz_elliptic_driver(cfg: &RunConfig, exp: &ExperimentConfig) -> DriverResult {
    let grids = spatial_grids(cfg, exp);
    let ps = p_list(exp, &[1.5, 3.0]);
    let p_max = ps.iter().cloned().fold(1.0f64, f64::max);
    let beta = singular_beta(cfg.dimension, p_max);
    let mut out = Vec::new();
    for (level, &m) in grids.iter().enumerate() {
        let d = Domain::unit_lab(cfg.dimension, m)?;
        let smooth = manufactured_pair(&d, &Recipe::TrigProduct { freq: [1, 2, 1] })?;
        let singular = {
            let f = capped_radial_power(&d, beta)?;
            let boundary = ScalarField::constant(d.clone(), 0.0)?;
            solve_poisson(&f, &boundary)?
        };
        for &p in &ps {
            out.push(cz_elliptic_report(&smooth, p, "smooth-trig", level, None)?);
            out.push(cz_elliptic_report(
                &singular,
                p,
                &format!("singular-b{beta}"),
                level,
                None,
            )?);
        }
    }
    Ok(out)
}

fn sharpness_driver(cfg: &RunConfig, exp: &ExperimentConfig) -> DriverResult {
    if cfg.dimension != 2 {
        return Err(RunError::Config(
            "sharpness_demo_pinf requires dimension 2".into(),
        ));
    }
    let grids = exp.grids.clone().unwrap_or_else(|| vec![48, 64, 96, 128]);
    Ok(sharpness_demo_pinf(&grids, 0)?)
}

fn duality_driver(cfg: &RunConfig, exp: &ExperimentConfig) -> DriverResult {
    let grids = spatial_grids(cfg, exp);
    let mut out = Vec::new();
    for (level, &m) in grids.iter().enumerate() {
        let d = Domain::unit_lab(cfg.dimension, m)?;
        // C^2 bumps: the kink-band truncation error is the leading O(h^2)
        // term, so the defect contracts at the generic second-order rate
        let u = manufactured_pair(
            &d,
            &Recipe::Bump {
                power: 3,
                radius: 0.95,
                center: [0.0; 3],
                amplitude: 1.0,
            },
        )?;
        let v = manufactured_pair(
            &d,
            &Recipe::Bump {
                power: 3,
                radius: 0.8,
                center: [0.15, -0.1, 0.0],
                amplitude: 1.3,
            },
        )?;
        out.push(duality_identity_check(&u, &v, "distinct", level)?);
        let w = manufactured_pair(
            &d,
            &Recipe::Bump {
                power: 6,
                radius: 0.9,
                center: [0.0; 3],
                amplitude: 1.0,
            },
        )?;
        out.push(duality_identity_check(&w, &w, "symmetric", level)?);
    }
    Ok(out)
}

fn theta_driver(cfg: &RunConfig, exp: &ExperimentConfig) -> DriverResult {
    let m = *spatial_grids(cfg, exp).first().expect("nonempty ladder");
    let delta = exp.delta.unwrap_or(DEFAULT_DELTA);
    let d = Domain::unit_lab(cfg.dimension, m)?;
    let spec = cfg.corpus_spec();
    let count = spec.count.clamp(2, 6);
    let funcs = corpus(&czlab_core::solvers::CorpusSpec { count, ..spec.clone() }, cfg.dimension);
    let hessians = funcs
        .par_iter()
        .map(|f| hessian(&f.sample_pair(&d)?.u))
        .collect::<Result<Vec<_>, CzError>>()?;
    let rs = RadiusSet::geometric(d.h(), 0.9 * d.half_width())?;
    let profile = theta_profile(&hessians, &rs, delta)?;

    let mut monotone_violation = 0.0f64;
    for w in profile.theta.windows(2) {
        monotone_violation = monotone_violation.max(w[1] - w[0]);
    }
    let mut selection_margin = f64::INFINITY;
    for j in 0..profile.radii.len() {
        let (k_m, j_m) = profile.attain[j];
        let selected = profile.osc[k_m][j_m];
        for row in &profile.osc {
            for jr in j_m..profile.radii.len() {
                selection_margin = selection_margin.min(selected - (1.0 - delta) * row[jr]);
            }
        }
    }
    let mut extra: Vec<Term> = profile
        .radii
        .iter()
        .zip(&profile.theta)
        .map(|(r, t)| Term::new(format!("theta_at_{r:.4}"), *t))
        .collect();
    extra.push(Term::new("monotone_violation", monotone_violation));
    extra.push(Term::new("selection_margin", selection_margin));
    extra.push(Term::new("delta", delta));

    Ok(vec![EstimateReport {
        experiment: "theta_profile".into(),
        label: format!("corpus-{count}"),
        grid: GridMeta::of(&d),
        refinement_level: 0,
        p: None,
        seed: Some(spec.seed),
        points: profile.radii.len(),
        lhs: profile.theta[0],
        rhs_terms: vec![Term::new("theta_min", *profile.theta.last().unwrap())],
        rhs: *profile.theta.last().unwrap(),
        ratio: 0.0,
        degenerate: profile.is_degenerate(),
        extra,
        inputs_hash: czlab_core::verify::inputs_hash(&["theta", &m.to_string(), &count.to_string()]),
    }])
}

fn blowup_driver(cfg: &RunConfig, exp: &ExperimentConfig) -> DriverResult {
    let m = *spatial_grids(cfg, exp).last().expect("nonempty ladder");
    let delta = exp.delta.unwrap_or(DEFAULT_DELTA);
    let d = Domain::unit_lab(cfg.dimension, m)?;
    let spec = cfg.corpus_spec();
    let pairs = corpus_pairs(&spec, &d)?;
    let r_m = 0.5;
    let rows: Vec<EstimateReport> = pairs
        .par_iter()
        .enumerate()
        .map(|(i, pair)| -> Result<EstimateReport, RunError> {
            let hess = hessian(&pair.u)?;
            let osc = czlab_core::maximal::local_oscillation2(
                &hess,
                &czlab_core::fields::region::Region::ball([0.0; 3], r_m),
            )?;
            let theta_m = osc / (1.0 - delta);
            let label = format!("corpus-{i:02}");
            let meta = GridMeta::of(&d);
            let hash = czlab_core::verify::inputs_hash(&["blowup", &label, &m.to_string()]);
            if theta_m <= 1e-14 {
                return Ok(EstimateReport {
                    experiment: "blowup_rescale".into(),
                    label,
                    grid: meta,
                    refinement_level: 0,
                    p: None,
                    seed: Some(spec.seed),
                    points: 0,
                    lhs: 0.0,
                    rhs_terms: vec![Term::new("theta_m", theta_m)],
                    rhs: theta_m,
                    ratio: 0.0,
                    degenerate: true,
                    extra: Vec::new(),
                    inputs_hash: hash,
                });
            }
            let state = blowup_rescale(pair, r_m, theta_m)?;
            Ok(EstimateReport {
                experiment: "blowup_rescale".into(),
                label,
                grid: meta,
                refinement_level: 0,
                p: None,
                seed: Some(spec.seed),
                points: 0,
                lhs: state.hess_ms_unit,
                rhs_terms: vec![Term::new("target", 1.0 - delta)],
                rhs: 1.0 - delta,
                ratio: state.hess_ms_unit / (1.0 - delta),
                degenerate: false,
                extra: vec![
                    Term::new("avg_defect", state.avg_defect),
                    Term::new("v_l2_b2", state.v_l2_b2),
                    Term::new("pde_residual", state.pde_residual),
                    Term::new("theta_m", theta_m),
                    Term::new("r_m", state.r_m),
                ],
                inputs_hash: hash,
            })
        })
        .collect::<Result<_, _>>()?;
    Ok(rows)
}

fn pointwise_parabolic_driver(cfg: &RunConfig, exp: &ExperimentConfig) -> DriverResult {
    let grids = parabolic_grids(cfg, exp);
    let points = exp.points.unwrap_or(DEFAULT_SAMPLE_POINTS);
    let mcfg = maximal_config(cfg);
    let spec = cfg.parabolic_corpus_spec();
    let mut out = Vec::new();
    for (level, &[m, nt]) in grids.iter().enumerate() {
        let grid = SpaceTimeDomain::unit_lab(cfg.dimension, m, nt)?;
        for (label, recipe) in [
            ("drift", HeatRecipe::DriftQuadratic),
            ("caloric", HeatRecipe::CaloricQuadratic),
        ] {
            let pair = manufactured_heat_pair(&grid, &recipe)?;
            out.push(pointwise_parabolic_report(
                &pair, points, &mcfg, label, level, None,
            )?);
        }
        let pairs = corpus_pairs_xt(&spec, &grid)?;
        let rows: Vec<EstimateReport> = pairs
            .par_iter()
            .enumerate()
            .map(|(i, pair)| {
                pointwise_parabolic_report(
                    pair,
                    points,
                    &mcfg,
                    &format!("corpus-{i:02}"),
                    level,
                    Some(spec.seed),
                )
            })
            .collect::<Result<_, _>>()?;
        out.extend(rows);
    }
    Ok(out)
}

fn cz_parabolic_driver(cfg: &RunConfig, exp: &ExperimentConfig) -> DriverResult {
    let grids = parabolic_grids(cfg, exp);
    let ps = p_list(exp, &[1.5, 3.0]);
    let p_max = ps.iter().cloned().fold(1.0f64, f64::max);
    let beta = singular_beta(cfg.dimension, p_max);
    let mut out = Vec::new();
    for (level, &[m, nt]) in grids.iter().enumerate() {
        let grid = SpaceTimeDomain::unit_lab(cfg.dimension, m, nt)?;
        let smooth = manufactured_heat_pair(&grid, &HeatRecipe::RampMode { freq: [1, 1, 1] })?;
        let singular = {
            // time-constant capped singular forcing, zero initial data
            let n = grid.space().n();
            let h = grid.space().h();
            let f = ScalarField::from_fn_xt(grid.clone(), |x, _| {
                let r = x[..n].iter().map(|v| v * v).sum::<f64>().sqrt().max(h);
                r.powf(-beta)
            })?;
            let u0 = ScalarField::constant(grid.space().clone(), 0.0)?;
            let boundary = ScalarField::constant(grid.clone(), 0.0)?;
            solve_heat(&f, &u0, &boundary, czlab_core::solvers::DEFAULT_THETA)?
        };
        for &p in &ps {
            out.push(cz_parabolic_report(&smooth, p, "smooth-ramp", level, None)?);
            out.push(cz_parabolic_report(
                &singular,
                p,
                &format!("singular-b{beta}"),
                level,
                None,
            )?);
        }
    }
    Ok(out)
}

fn parabolic_duality_driver(cfg: &RunConfig, exp: &ExperimentConfig) -> DriverResult {
    let grids = exp
        .parabolic_grids
        .clone()
        .unwrap_or_else(|| vec![[65, 33], [129, 65]]);
    let mut out = Vec::new();
    for (level, &[m, nt]) in grids.iter().enumerate() {
        let grid = SpaceTimeDomain::new(Domain::unit_lab(cfg.dimension, m)?, 0.0, 1.0, nt)?;
        let u = manufactured_heat_pair(
            &grid,
            &HeatRecipe::PowerRampBump {
                tpow: 2,
                power: 6,
                radius: 0.95,
                center: [0.0; 3],
                amplitude: 1.0,
            },
        )?;
        let v = manufactured_heat_pair(
            &grid,
            &HeatRecipe::PowerRampBump {
                tpow: 3,
                power: 6,
                radius: 0.8,
                center: [0.15, -0.1, 0.0],
                amplitude: 1.3,
            },
        )?;
        out.push(parabolic_duality_check(&u, &v, "distinct", level)?);
        out.push(parabolic_duality_check(&u, &u, "symmetric", level)?);
    }
    Ok(out)
}

/// All monomials of parabolic degree 1..=6 in `n` spatial variables.
fn degree_six_monomials(n: usize) -> Vec<PolyXt> {
    let mut out = Vec::new();
    let max_deg = 6u32;
    let mut emit = |powers: [u32; 3], tpow: u32| {
        let deg: u32 = powers.iter().sum::<u32>() + 2 * tpow;
        if (1..=max_deg).contains(&deg) {
            out.push(PolyXt {
                terms: vec![MonomialXt {
                    coef: 1.0,
                    powers,
                    tpow,
                }],
            });
        }
    };
    for a1 in 0..=max_deg {
        for a2 in 0..=(max_deg.saturating_sub(a1)) {
            for a3 in 0..=(max_deg.saturating_sub(a1 + a2)) {
                if (a2 > 0 && n < 2) || (a3 > 0 && n < 3) {
                    continue;
                }
                for b in 0..=((max_deg.saturating_sub(a1 + a2 + a3)) / 2) {
                    emit([a1, a2, a3], b);
                }
            }
        }
    }
    out
}

fn poly_growth_driver(cfg: &RunConfig, exp: &ExperimentConfig) -> DriverResult {
    let [m, nt] = exp
        .parabolic_grids
        .as_ref()
        .and_then(|g| g.first().copied())
        .unwrap_or([192, 384]);
    let grid = SpaceTimeDomain::unit_lab(cfg.dimension, m, nt)?;
    let ladder = [1.0, 1.26, 1.587, 2.0];
    let mut polys = degree_six_monomials(cfg.dimension);
    // the degenerate constant rides along to exercise the flag
    polys.push(PolyXt::monomial(7.0, [0, 0, 0], 0));
    let rows: Vec<EstimateReport> = polys
        .par_iter()
        .map(|poly| -> Result<EstimateReport, RunError> {
            let mut rep = poly_growth_check(poly, &grid, &ladder, 0)?;
            if poly.terms.len() == 1
                && poly.terms[0].powers == [0, 0, 0]
                && poly.terms[0].tpow == 1
            {
                rep.extra.push(Term::new("t_constant_target", 1.0 / 12.0));
            }
            Ok(rep)
        })
        .collect::<Result<_, _>>()?;
    Ok(rows)
}

fn mean_value_driver(cfg: &RunConfig, exp: &ExperimentConfig) -> DriverResult {
    if cfg.dimension != 2 {
        return Err(RunError::Config("mean_value_check requires dimension 2".into()));
    }
    let grids = spatial_grids(cfg, exp);
    let centers = [
        [0.0, 0.0, 0.0],
        [0.3, 0.1, 0.0],
        [-0.2, 0.25, 0.0],
        [0.1, -0.3, 0.0],
        [-0.15, -0.2, 0.0],
    ];
    let radii = [0.5, 0.7, 0.9];
    let mut out = Vec::new();
    for (level, &m) in grids.iter().enumerate() {
        let d = Domain::unit_lab(2, m)?;
        for (label, recipe) in [
            ("x1", Recipe::Monomial { powers: [1, 0, 0], coef: 1.0 }),
            ("saddle", Recipe::HarmonicSaddle),
            ("cubic", Recipe::HarmonicPoly { degree: 3, imag: false }),
        ] {
            let u = recipe.sample_u(&d)?;
            out.push(mean_value_check(&u, &centers, &radii, 1e-8, label, level)?);
        }
    }
    Ok(out)
}

fn growth_bound_driver(cfg: &RunConfig, exp: &ExperimentConfig) -> DriverResult {
    if cfg.dimension != 2 {
        return Err(RunError::Config("growth_bound_check requires dimension 2".into()));
    }
    let m = *spatial_grids(cfg, exp).last().expect("nonempty ladder");
    let d = Domain::unit_lab(2, m)?;
    let ladder = [1.0, 1.5, 2.0];
    let mut out = Vec::new();
    for (label, recipe, tol) in [
        (
            "affine",
            Recipe::Monomial { powers: [1, 0, 0], coef: 2.0 },
            1e-8,
        ),
        ("saddle", Recipe::HarmonicSaddle, 1e-8),
        (
            "cubic",
            Recipe::HarmonicPoly { degree: 3, imag: false },
            1e-8,
        ),
        (
            "quartic",
            Recipe::HarmonicPoly { degree: 4, imag: false },
            // sampled quartic harmonics carry a constant O(h^2) discrete
            // Laplacian; scale the harmonicity gate accordingly
            100.0 * d.h() * d.h(),
        ),
    ] {
        let u = recipe.sample_u(&d)?;
        out.push(growth_bound_check(&u, &ladder, tol, label, 0)?);
    }
    Ok(out)
}
