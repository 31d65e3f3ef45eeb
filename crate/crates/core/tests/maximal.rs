//! Maximal-operator oracle tests: backend equivalence, closed-form values,
//! domination, scaling laws and determinism.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use czlab_core::fields::domain::{Domain, SpaceTimeDomain};
use czlab_core::fields::region::Region;
use czlab_core::fields::scalar::ScalarField;
use czlab_core::maximal::{
    hl_maximal, local_oscillation2, sharp_maximal_2, Backend, LadderKind, RadiusSet,
};

fn random_field(domain: &Domain, seed: u64, span: f64) -> ScalarField<Domain> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..domain.node_count())
        .map(|_| rng.random_range(-span..span))
        .collect();
    ScalarField::from_values(domain.clone(), values).unwrap()
}

fn random_field_xt(grid: &SpaceTimeDomain, seed: u64, span: f64) -> ScalarField<SpaceTimeDomain> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..grid.node_count())
        .map(|_| rng.random_range(-span..span))
        .collect();
    ScalarField::from_values(grid.clone(), values).unwrap()
}

fn all_nodes(count: usize) -> Vec<usize> {
    (0..count).collect()
}

#[test]
fn mask_equals_brute_bitwise_on_seeded_fields() {
    let domain = Domain::unit_lab(2, 32).unwrap();
    let rs = RadiusSet::for_domain(&domain, LadderKind::Geometric).unwrap();
    let points = all_nodes(domain.node_count());
    for seed in 0..8 {
        let w = random_field(&domain, seed, 10.0);
        let fast = sharp_maximal_2(&w, &points, &rs, Backend::Mask).unwrap();
        let brute = sharp_maximal_2(&w, &points, &rs, Backend::Brute).unwrap();
        for i in 0..points.len() {
            assert_eq!(fast.value(i), brute.value(i), "seed {seed} point {i}");
            assert_eq!(fast.argmax(i), brute.argmax(i), "seed {seed} argmax {i}");
        }
    }
}

#[test]
fn mask_equals_brute_bitwise_parabolic() {
    let grid = SpaceTimeDomain::unit_lab(2, 16, 16).unwrap();
    let rs = RadiusSet::for_domain(grid.space(), LadderKind::Geometric).unwrap();
    let points = all_nodes(grid.node_count());
    for seed in 100..104 {
        let w = random_field_xt(&grid, seed, 10.0);
        let fast = sharp_maximal_2(&w, &points, &rs, Backend::Mask).unwrap();
        let brute = sharp_maximal_2(&w, &points, &rs, Backend::Brute).unwrap();
        for i in 0..points.len() {
            assert_eq!(fast.value(i), brute.value(i), "seed {seed} point {i}");
        }
    }
}

#[test]
fn fft_backend_matches_mask_to_1e9() {
    let domain = Domain::unit_lab(2, 32).unwrap();
    let rs = RadiusSet::for_domain(&domain, LadderKind::Geometric).unwrap();
    let points = all_nodes(domain.node_count());
    let w = random_field(&domain, 7, 5.0);
    let fast = sharp_maximal_2(&w, &points, &rs, Backend::Mask).unwrap();
    let fft = sharp_maximal_2(&w, &points, &rs, Backend::FftLike).unwrap();
    for i in 0..points.len() {
        match (fast.value(i), fft.value(i)) {
            (Some(a), Some(b)) => {
                let rel = (a - b).abs() / a.abs().max(1e-12);
                assert!(rel <= 1e-9, "point {i}: mask {a} vs fft {b} (rel {rel})");
            }
            (a, b) => assert_eq!(a.is_some(), b.is_some(), "validity mismatch at {i}"),
        }
    }
}

#[test]
fn fft_backend_matches_mask_parabolic() {
    let grid = SpaceTimeDomain::unit_lab(2, 16, 16).unwrap();
    let rs = RadiusSet::for_domain(grid.space(), LadderKind::Geometric).unwrap();
    let points = all_nodes(grid.node_count());
    let w = random_field_xt(&grid, 3, 5.0);
    let fast = sharp_maximal_2(&w, &points, &rs, Backend::Mask).unwrap();
    let fft = sharp_maximal_2(&w, &points, &rs, Backend::FftLike).unwrap();
    for i in 0..points.len() {
        if let (Some(a), Some(b)) = (fast.value(i), fft.value(i)) {
            let rel = (a - b).abs() / a.abs().max(1e-12);
            assert!(rel <= 1e-9, "point {i}: mask {a} vs fft {b}");
        }
    }
}

#[test]
fn constant_field_maximal_is_zero_and_hl_is_c_squared() {
    let domain = Domain::unit_lab(2, 33).unwrap();
    let rs = RadiusSet::for_domain(&domain, LadderKind::Geometric).unwrap();
    let c = 4.5f64;
    let w = ScalarField::constant(domain.clone(), c).unwrap();
    let center = domain.flat(domain.nearest_node(&[0.0, 0.0]));
    let sharp = sharp_maximal_2(&w, &[center], &rs, Backend::Mask).unwrap();
    assert_eq!(sharp.value(0), Some(0.0), "constant oscillation is exactly 0");
    let hl = hl_maximal(&w, &[center], &rs, Backend::Mask).unwrap();
    assert_eq!(hl.value(0), Some(c * c));
}

#[test]
fn linear_field_maximal_matches_closed_form() {
    // continuum oscillation of x1 over B_r is r^2/4 (n = 2), increasing in r,
    // so the sup sits at the largest admissible radius
    let domain = Domain::unit_lab(2, 64).unwrap();
    let h = domain.h();
    let rs = RadiusSet::for_domain(&domain, LadderKind::Geometric).unwrap();
    let w = ScalarField::from_fn(domain.clone(), |x| x[0]).unwrap();
    let center = domain.flat(domain.nearest_node(&[0.0, 0.0]));
    let r_max = rs.max_admissible_at(&domain, center).unwrap();
    let sharp = sharp_maximal_2(&w, &[center], &rs, Backend::Mask).unwrap();
    let value = sharp.value(0).unwrap();
    let expected = r_max * r_max / 4.0;
    assert!(
        (value - expected).abs() <= 3.0 * h * h,
        "sharp = {value}, closed form {expected}, tol {}",
        3.0 * h * h
    );
    assert_eq!(sharp.argmax(0), Some(r_max), "argmax at the largest radius");
    // Hardy-Littlewood value agrees for the centered linear field
    let hl = hl_maximal(&w, &[center], &rs, Backend::Mask).unwrap();
    let hv = hl.value(0).unwrap();
    assert!((hv - expected).abs() <= 3.0 * h * h + 2.0 * h, "hl = {hv}");
}

#[test]
fn time_ramp_parabolic_maximal_matches_uniform_variance() {
    // w = t over Q_r(0,0): the variance of the uniform node times,
    // r^4/12 in the continuum
    let grid = SpaceTimeDomain::unit_lab(2, 64, 64).unwrap();
    let h = grid.space().h();
    let tau = grid.tau();
    let rs = RadiusSet::for_domain(grid.space(), LadderKind::Geometric).unwrap();
    let w = ScalarField::from_fn_xt(grid.clone(), |_, t| t).unwrap();
    let s = grid.space().flat(grid.space().nearest_node(&[0.0, 0.0]));
    let center = grid.flat(grid.nearest_slice(0.0), s);
    let r_max = rs.max_admissible_at(&grid, center).unwrap();
    let sharp = sharp_maximal_2(&w, &[center], &rs, Backend::Mask).unwrap();
    let value = sharp.value(0).unwrap();
    let expected = r_max.powi(4) / 12.0;
    let tol = 3.0 * (h * h + tau);
    assert!(
        (value - expected).abs() <= tol,
        "parabolic sharp = {value}, closed form {expected}, tol {tol}"
    );
    assert_eq!(sharp.argmax(0), Some(r_max));
}

#[test]
fn sharp_is_dominated_by_hl_with_zero_tolerance() {
    let domain = Domain::unit_lab(2, 48).unwrap();
    let rs = RadiusSet::for_domain(&domain, LadderKind::Geometric).unwrap();
    let points = all_nodes(domain.node_count());
    for seed in [11, 12] {
        let w = random_field(&domain, seed, 10.0);
        let sharp = sharp_maximal_2(&w, &points, &rs, Backend::Mask).unwrap();
        let hl = hl_maximal(&w, &points, &rs, Backend::Mask).unwrap();
        for i in 0..points.len() {
            match (sharp.value(i), hl.value(i)) {
                (Some(s), Some(h)) => assert!(s <= h, "domination violated at {i}: {s} > {h}"),
                (None, None) => {}
                _ => panic!("validity mismatch at {i}"),
            }
        }
    }
}

#[test]
fn quadratic_scaling_and_constant_shift() {
    let domain = Domain::unit_lab(2, 32).unwrap();
    let rs = RadiusSet::for_domain(&domain, LadderKind::Geometric).unwrap();
    let points: Vec<usize> = all_nodes(domain.node_count())
        .into_iter()
        .step_by(7)
        .filter(|&p| domain.nodes_to_boundary(domain.multi(p)) >= 3)
        .collect();
    let w = random_field(&domain, 21, 5.0);
    let base = sharp_maximal_2(&w, &points, &rs, Backend::Mask).unwrap();

    let lambda = 3.5f64;
    let scaled = sharp_maximal_2(&w.scale(lambda).unwrap(), &points, &rs, Backend::Mask).unwrap();
    for i in 0..points.len() {
        let (a, b) = (base.value(i).unwrap(), scaled.value(i).unwrap());
        let rel = (b - lambda * lambda * a).abs() / (lambda * lambda * a).abs().max(1e-300);
        assert!(rel <= 1e-10, "lambda^2 scaling at {i}: rel {rel}");
    }

    let shifted = sharp_maximal_2(
        &w.map(|v| v + 7.25).unwrap(),
        &points,
        &rs,
        Backend::Mask,
    )
    .unwrap();
    for i in 0..points.len() {
        let (a, b) = (base.value(i).unwrap(), shifted.value(i).unwrap());
        // invariant up to floating-point cancellation in the moment form
        assert!(
            (a - b).abs() <= 1e-12 * (1.0 + a.abs().max(b.abs()) + 7.25f64.powi(2)),
            "shift invariance at {i}: {a} vs {b}"
        );
    }
}

#[test]
fn invalid_points_are_flagged_not_zero() {
    let domain = Domain::unit_lab(2, 32).unwrap();
    // only one large radius: corner points admit nothing
    let rs = RadiusSet::from_radii(vec![1.0], domain.h()).unwrap();
    let w = random_field(&domain, 5, 1.0);
    let corner = domain.flat([0, 0, 0]);
    let center = domain.flat(domain.nearest_node(&[0.0, 0.0]));
    let mf = sharp_maximal_2(&w, &[corner, center], &rs, Backend::Mask).unwrap();
    assert!(!mf.is_valid(0), "corner has no admissible radius");
    assert_eq!(mf.value(0), None);
    assert!(mf.is_valid(1));
}

#[test]
fn results_are_bitwise_stable_across_thread_counts() {
    let domain = Domain::unit_lab(2, 32).unwrap();
    let rs = RadiusSet::for_domain(&domain, LadderKind::Geometric).unwrap();
    let points = all_nodes(domain.node_count());
    let w = random_field(&domain, 77, 3.0);
    let single = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(|| sharp_maximal_2(&w, &points, &rs, Backend::Mask).unwrap());
    let multi = rayon::ThreadPoolBuilder::new()
        .num_threads(4)
        .build()
        .unwrap()
        .install(|| sharp_maximal_2(&w, &points, &rs, Backend::Mask).unwrap());
    for i in 0..points.len() {
        assert_eq!(single.value(i), multi.value(i));
        assert_eq!(single.argmax(i), multi.argmax(i));
    }
}

#[test]
fn translation_by_a_grid_vector_shifts_values_bitwise() {
    let domain = Domain::unit_lab(2, 32).unwrap();
    let m = domain.m();
    let stride = domain.strides()[0];
    let w = random_field(&domain, 31, 2.0);
    // shift along axis 0 by one node; first row wraps with garbage, so keep
    // points and radii far from it
    let mut shifted = vec![0.0; domain.node_count()];
    shifted[stride..].copy_from_slice(&w.values()[..domain.node_count() - stride]);
    let ws = ScalarField::from_values(domain.clone(), shifted).unwrap();
    let rs = RadiusSet::from_radii(
        vec![2.0 * domain.h(), 3.0 * domain.h(), 4.5 * domain.h()],
        domain.h(),
    )
    .unwrap();
    let pts: Vec<usize> = (10..m - 10)
        .flat_map(|i| (10..m - 10).map(move |j| i * m + j))
        .step_by(11)
        .collect();
    let shifted_pts: Vec<usize> = pts.iter().map(|p| p + stride).collect();
    let base = sharp_maximal_2(&w, &pts, &rs, Backend::Mask).unwrap();
    let moved = sharp_maximal_2(&ws, &shifted_pts, &rs, Backend::Mask).unwrap();
    for i in 0..pts.len() {
        assert_eq!(base.value(i), moved.value(i), "translation covariance at {i}");
    }
}

#[test]
fn two_pass_identity_agrees_on_bounded_fields() {
    let domain = Domain::unit_lab(2, 48).unwrap();
    let w = random_field(&domain, 99, 10.0);
    // radii chosen between lattice radii so the region membership is stable
    for r in [0.37, 0.81, 1.43] {
        let osc = local_oscillation2(&w, &Region::ball([0.05, -0.1, 0.0], r)).unwrap();
        assert!(osc >= 0.0);
    }
}

#[test]
fn argmax_ties_break_to_the_smaller_radius() {
    // a field that is zero beyond radius 0.5: oscillation is equal-ish across
    // large radii... instead use an exactly constant field, where every
    // radius gives exactly 0 and the reported argmax must be the smallest
    let domain = Domain::unit_lab(2, 32).unwrap();
    let rs = RadiusSet::for_domain(&domain, LadderKind::Geometric).unwrap();
    let w = ScalarField::constant(domain.clone(), 1.0).unwrap();
    let center = domain.flat(domain.nearest_node(&[0.0, 0.0]));
    let mf = sharp_maximal_2(&w, &[center], &rs, Backend::Mask).unwrap();
    assert_eq!(mf.argmax(0), Some(rs.radii()[0]));
}

#[test]
fn hl_and_tensor_inputs_match_brute_bitwise() {
    use czlab_core::fields::deriv::hessian;
    let domain = Domain::unit_lab(2, 48).unwrap();
    let rs = RadiusSet::for_domain(&domain, LadderKind::Geometric).unwrap();
    let points: Vec<usize> = all_nodes(domain.node_count()).into_iter().step_by(3).collect();
    let w = random_field(&domain, 55, 10.0);
    let fast = hl_maximal(&w, &points, &rs, Backend::Mask).unwrap();
    let brute = hl_maximal(&w, &points, &rs, Backend::Brute).unwrap();
    for i in 0..points.len() {
        assert_eq!(fast.value(i), brute.value(i), "hl mismatch at {i}");
    }
    // tensor input: the Hessian of a smooth field, channelwise moments
    let u = ScalarField::from_fn(domain.clone(), |x| (1.7 * x[0]).sin() * (0.8 * x[1]).cos()).unwrap();
    let hess = hessian(&u).unwrap();
    let fast = sharp_maximal_2(&hess, &points, &rs, Backend::Mask).unwrap();
    let brute = sharp_maximal_2(&hess, &points, &rs, Backend::Brute).unwrap();
    for i in 0..points.len() {
        assert_eq!(fast.value(i), brute.value(i), "tensor mismatch at {i}");
        assert_eq!(fast.argmax(i), brute.argmax(i));
    }
}

#[test]
fn oracle_equivalence_holds_in_one_and_three_dimensions() {
    for n in [1usize, 3] {
        let m = if n == 1 { 65 } else { 16 };
        let domain = Domain::unit_lab(n, m).unwrap();
        let rs = RadiusSet::for_domain(&domain, LadderKind::Geometric).unwrap();
        let points = all_nodes(domain.node_count());
        let w = random_field(&domain, 7 + n as u64, 5.0);
        let fast = sharp_maximal_2(&w, &points, &rs, Backend::Mask).unwrap();
        let brute = sharp_maximal_2(&w, &points, &rs, Backend::Brute).unwrap();
        for i in 0..points.len() {
            assert_eq!(fast.value(i), brute.value(i), "n = {n}, point {i}");
        }
    }
}

#[test]
fn dense_ladder_is_well_formed_and_evaluates() {
    let domain = Domain::unit_lab(2, 48).unwrap();
    let h = domain.h();
    let geo = RadiusSet::for_domain(&domain, LadderKind::Geometric).unwrap();
    let dense = RadiusSet::for_domain(&domain, LadderKind::Dense).unwrap();
    assert!(dense.radii().len() > geo.radii().len());
    assert_eq!(dense.radii()[0], 2.0 * h);
    for (k, &r) in dense.radii().iter().enumerate() {
        assert!((r - (k as f64 + 2.0) * h).abs() < 1e-12, "multiples of h");
    }
    let w = random_field(&domain, 13, 4.0);
    let center = domain.flat(domain.nearest_node(&[0.0, 0.0]));
    let d = sharp_maximal_2(&w, &[center], &dense, Backend::Mask).unwrap();
    let argmax = d.argmax(0).unwrap();
    assert!(dense.radii().contains(&argmax));
}
