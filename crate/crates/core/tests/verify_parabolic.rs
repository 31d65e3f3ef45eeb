//! Parabolic experiment tests: trivial caloric cases, the cube-measure
//! closed form, time-reversal duality and polynomial growth exponents.

use czlab_core::fields::domain::{Domain, SpaceTimeDomain};
use czlab_core::fields::region::{region_measure, Region};
use czlab_core::solvers::{manufactured_heat_pair, HeatRecipe};
use czlab_core::verify::{
    cz_parabolic_report, parabolic_duality_check, pointwise_parabolic_report, poly_growth_check,
    thresholds, MaximalConfig, PolyXt,
};

fn lab_grid(m: usize, nt: usize) -> SpaceTimeDomain {
    SpaceTimeDomain::unit_lab(2, m, nt).unwrap()
}

#[test]
fn pointwise_parabolic_vanishes_for_constant_derivatives() {
    let grid = lab_grid(48, 48);
    let cfg = MaximalConfig::default();
    for recipe in [HeatRecipe::DriftQuadratic, HeatRecipe::CaloricQuadratic] {
        let pair = manufactured_heat_pair(&grid, &recipe).unwrap();
        let rep = pointwise_parabolic_report(&pair, 25, &cfg, "trivial", 0, None).unwrap();
        assert!(
            rep.ratio <= thresholds::POINTWISE_TRIVIAL_TOL,
            "{recipe:?}: ratio {}",
            rep.ratio
        );
    }
}

#[test]
fn cz_parabolic_closed_form_for_linear_time() {
    // u = t, f = 1: lhs = |Q_1/2| (the dt term), rhs = int_{Q_1}|t|^p + |Q_1|
    let grid = lab_grid(64, 64);
    let pair = manufactured_heat_pair(&grid, &HeatRecipe::LinearTime).unwrap();
    let p = 2.0;
    let rep = cz_parabolic_report(&pair, p, "linear-time", 0, None).unwrap();
    let q_half = region_measure(&grid, &Region::cube([0.0; 3], 0.0, 0.5)).unwrap();
    assert!(
        (rep.lhs - q_half).abs() < 1e-10 * q_half,
        "lhs {} vs |Q_1/2| {q_half}",
        rep.lhs
    );
    // oracle: int_{Q_1} t^2 over B_1 x (-1/2, 1/2] = |B_1| * [t^3/3] = |B_1|/12
    let b1 = std::f64::consts::PI;
    let q1 = b1; // |Q_1| = |B_1| * 1
    let expected_rhs = b1 / 12.0 + q1;
    assert!(
        (rep.rhs - expected_rhs).abs() < 0.05 * expected_rhs,
        "rhs {} vs closed form {expected_rhs}",
        rep.rhs
    );
}

#[test]
fn cz_parabolic_caloric_family_is_bounded() {
    let grid = lab_grid(48, 48);
    for recipe in [
        HeatRecipe::CaloricQuadratic,
        HeatRecipe::DecayMode { freq: [1, 1, 0] },
        HeatRecipe::DecayMode { freq: [2, 1, 0] },
    ] {
        let pair = manufactured_heat_pair(&grid, &recipe).unwrap();
        let rep = cz_parabolic_report(&pair, 3.0, "caloric", 0, None).unwrap();
        assert!(rep.ratio.is_finite(), "{recipe:?}");
        assert!(rep.ratio < 100.0, "{recipe:?}: ratio {}", rep.ratio);
    }
}

fn ramp_pairs(
    grid: &SpaceTimeDomain,
) -> (
    czlab_core::solvers::SolutionPair<SpaceTimeDomain>,
    czlab_core::solvers::SolutionPair<SpaceTimeDomain>,
) {
    let u = manufactured_heat_pair(
        grid,
        &HeatRecipe::PowerRampBump {
            tpow: 2,
            power: 6,
            radius: 0.95,
            center: [0.0; 3],
            amplitude: 1.0,
        },
    )
    .unwrap();
    let v = manufactured_heat_pair(
        grid,
        &HeatRecipe::PowerRampBump {
            tpow: 3,
            power: 6,
            radius: 0.8,
            center: [0.15, -0.1, 0.0],
            amplitude: 1.3,
        },
    )
    .unwrap();
    (u, v)
}

fn unit_time_grid(m: usize, nt: usize) -> SpaceTimeDomain {
    SpaceTimeDomain::new(Domain::unit_lab(2, m).unwrap(), 0.0, 1.0, nt).unwrap()
}

#[test]
fn parabolic_duality_trivial_cases() {
    let grid = unit_time_grid(33, 17);
    let (u, _) = ramp_pairs(&grid);
    // u == 0 on both sides: degenerate, exact zero
    let zero = czlab_core::solvers::SolutionPair {
        u: czlab_core::fields::scalar::ScalarField::constant(grid.clone(), 0.0).unwrap(),
        f: czlab_core::fields::scalar::ScalarField::constant(grid.clone(), 0.0).unwrap(),
        provenance: czlab_core::solvers::Provenance::Manufactured,
        residual: 0.0,
    };
    let rep = parabolic_duality_check(&zero, &zero, "zero", 0).unwrap();
    assert!(rep.degenerate);
    assert_eq!(rep.lhs, 0.0);

    // nonzero initial data is rejected
    let bad = manufactured_heat_pair(&grid, &HeatRecipe::CaloricQuadratic).unwrap();
    assert!(parabolic_duality_check(&bad, &u, "bad", 0).is_err());
}

#[test]
fn parabolic_duality_contracts_at_second_order() {
    let defect = |m: usize, nt: usize| {
        let grid = unit_time_grid(m, nt);
        let (u, v) = ramp_pairs(&grid);
        parabolic_duality_check(&u, &v, "ramp", 0).unwrap().ratio
    };
    let d1 = defect(65, 33);
    let d2 = defect(129, 65);
    let rate = d1 / d2;
    let (lo, hi) = thresholds::DUALITY_CONTRACTION;
    assert!(
        (lo..=hi).contains(&rate),
        "parabolic duality contraction {d1} -> {d2} (rate {rate})"
    );
}

#[test]
fn poly_growth_matches_parabolic_degrees() {
    // fine time lattice keeps the discrete time variance close to r^4/12
    let grid = SpaceTimeDomain::unit_lab(2, 64, 512).unwrap();
    let ladder = [1.0, 1.26, 1.587, 2.0];

    // p = t: N = 2, sigma = 4, constant 1/12
    let rep = poly_growth_check(&PolyXt::monomial(1.0, [0, 0, 0], 1), &grid, &ladder, 0).unwrap();
    assert!(
        (rep.lhs - 4.0).abs() <= thresholds::POLY_EXPONENT_TOL,
        "sigma for t: {}",
        rep.lhs
    );
    let c = rep.extra_value("fitted_constant").unwrap();
    assert!(
        (c - 1.0 / 12.0).abs() <= thresholds::POLY_T_CONSTANT_RTOL / 12.0,
        "constant for t: {c}"
    );

    // p = x1: N = 1, sigma = 2, constant 1/4 (n = 2)
    let rep = poly_growth_check(&PolyXt::monomial(1.0, [1, 0, 0], 0), &grid, &ladder, 0).unwrap();
    assert!((rep.lhs - 2.0).abs() <= thresholds::POLY_EXPONENT_TOL, "sigma {}", rep.lhs);

    // constant: degenerate
    let rep = poly_growth_check(&PolyXt::monomial(7.0, [0, 0, 0], 0), &grid, &ladder, 0).unwrap();
    assert!(rep.degenerate);

    // ladder too short
    assert!(poly_growth_check(&PolyXt::monomial(1.0, [1, 0, 0], 0), &grid, &ladder[..2], 0).is_err());
}

#[test]
fn poly_growth_worst_case_monomials() {
    // the quartic/sextic spatial monomials are the quadrature-hardest cases;
    // the acceptance suite sweeps the complete degree <= 6 family
    let grid = SpaceTimeDomain::unit_lab(2, 192, 384).unwrap();
    let ladder = [1.0, 1.26, 1.587, 2.0];
    for (a1, a2, b) in [(0u32, 4u32, 0u32), (6, 0, 0), (3, 3, 0), (2, 2, 1), (0, 0, 3)] {
        let degree = a1 + a2 + 2 * b;
        let poly = PolyXt::monomial(1.0, [a1, a2, 0], b);
        let rep = poly_growth_check(&poly, &grid, &ladder, 0).unwrap();
        assert!(
            (rep.lhs - 2.0 * degree as f64).abs() <= thresholds::POLY_EXPONENT_TOL,
            "x^({a1},{a2}) t^{b}: sigma {} vs {}",
            rep.lhs,
            2 * degree
        );
    }
}
