//! Blow-up machinery: the oscillation profile `Theta(r)` with its
//! near-supremum selection, and the rescaling that produces the normalized
//! functions `v_m, g_m` whose unit-ball averages vanish.

use crate::error::{CzError, Result};
use crate::fields::deriv::{dt, gradient, hessian, laplacian};
use crate::fields::domain::{Domain, Grid, SpaceTimeDomain};
use crate::fields::region::{
    lp_norm, mean_square_tensor, region_average, region_average_tensor, Region,
};
use crate::fields::scalar::ScalarField;
use crate::fields::tensor::{sym_components, SymTensorField};
use crate::maximal::{local_oscillation2, MaximalInput, RadiusSet};
use crate::solvers::SolutionPair;

/// Oscillation profile of a family of fields at the origin:
/// `Theta(r) = max_k max_{rho >= r} osc(field_k, rho)`, with the attaining
/// pair per ladder radius and the near-supremum selection factor `1 - delta`.
#[derive(Clone, Debug)]
pub struct ThetaProfile {
    pub radii: Vec<f64>,
    /// `osc[k][j]`: oscillation of field `k` at radius `radii[j]`.
    pub osc: Vec<Vec<f64>>,
    /// `theta[j] = max_{k, j' >= j} osc[k][j']`, nonincreasing in `j`... in r.
    pub theta: Vec<f64>,
    /// Attaining `(field, radius index)` per ladder radius.
    pub attain: Vec<(usize, usize)>,
    pub delta: f64,
}

/// One selected blow-up seed: radius, field and the normalizer
/// `theta_m = osc / (1 - delta)`, which makes the rescaled Hessian carry
/// mean-square `1 - delta` on the unit ball.
#[derive(Clone, Copy, Debug)]
pub struct BlowupSelection {
    pub r_m: f64,
    pub field: usize,
    pub theta_m: f64,
}

impl ThetaProfile {
    /// Selection at ladder index `j`: the attaining pair, which satisfies the
    /// `(1 - delta)` inequality against every (field, radius >= r_j) by
    /// construction.
    pub fn selection(&self, j: usize) -> BlowupSelection {
        let (field, jr) = self.attain[j];
        BlowupSelection {
            r_m: self.radii[jr],
            field,
            theta_m: self.osc[field][jr] / (1.0 - self.delta),
        }
    }

    /// Normalizer for a caller-chosen `(field, radius index)` pair.
    pub fn normalizer(&self, field: usize, j: usize) -> BlowupSelection {
        BlowupSelection {
            r_m: self.radii[j],
            field,
            theta_m: self.osc[field][j] / (1.0 - self.delta),
        }
    }

    pub fn is_degenerate(&self) -> bool {
        self.theta.iter().all(|&t| t <= 1e-14)
    }
}

fn build_profile(radii: &[f64], osc: Vec<Vec<f64>>, delta: f64) -> ThetaProfile {
    let nr = radii.len();
    let mut theta = vec![0.0; nr];
    let mut attain = vec![(0usize, 0usize); nr];
    for j in (0..nr).rev() {
        let (mut best, mut best_at) = if j + 1 < nr {
            (theta[j + 1], attain[j + 1])
        } else {
            (f64::NEG_INFINITY, (0, 0))
        };
        // scan radius j across fields; strict improvement keeps ties at the
        // smaller radius (carried from larger j only when strictly bigger)
        for (k, row) in osc.iter().enumerate() {
            if row[j] > best {
                best = row[j];
                best_at = (k, j);
            }
        }
        theta[j] = best;
        attain[j] = best_at;
    }
    ThetaProfile {
        radii: radii.to_vec(),
        osc,
        theta,
        attain,
        delta,
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if !(0.0..1.0).contains(&delta) || delta == 0.0 {
        return Err(CzError::InvalidInput(format!(
            "delta must lie in (0, 1), got {delta}"
        )));
    }
    Ok(())
}

/// Profile of Hessian oscillations over balls at the origin (elliptic mode).
pub fn theta_profile(
    hessians: &[SymTensorField<Domain>],
    rs: &RadiusSet,
    delta: f64,
) -> Result<ThetaProfile> {
    check_delta(delta)?;
    if hessians.is_empty() {
        return Err(CzError::InvalidInput("empty field list".into()));
    }
    let radii = rs.radii();
    let mut osc = Vec::with_capacity(hessians.len());
    for hess in hessians {
        let mut row = Vec::with_capacity(radii.len());
        for &r in radii {
            row.push(local_oscillation2(hess, &Region::ball([0.0; 3], r))?);
        }
        osc.push(row);
    }
    Ok(build_profile(radii, osc, delta))
}

/// Parabolic profile: per field, the sum of the Hessian and time-derivative
/// oscillations over parabolic cubes at the origin.
pub fn theta_profile_parabolic(
    fields: &[(
        SymTensorField<SpaceTimeDomain>,
        ScalarField<SpaceTimeDomain>,
    )],
    rs: &RadiusSet,
    delta: f64,
) -> Result<ThetaProfile> {
    check_delta(delta)?;
    if fields.is_empty() {
        return Err(CzError::InvalidInput("empty field list".into()));
    }
    let radii = rs.radii();
    let mut osc = Vec::with_capacity(fields.len());
    for (hess, dtu) in fields {
        let mut row = Vec::with_capacity(radii.len());
        for &r in radii {
            let q = Region::cube([0.0; 3], 0.0, r);
            let o = local_oscillation2(hess, &q)?
                + local_oscillation2(MaximalInput::Scalar(dtu), &q)?;
            row.push(o);
        }
        osc.push(row);
    }
    Ok(build_profile(radii, osc, delta))
}

/// Result of one blow-up rescaling step.
#[derive(Clone, Debug)]
pub struct BlowupState<G: Grid> {
    pub r_m: f64,
    pub theta_m: f64,
    /// `v_m(x) = (u(r_m x) - p_m(x)) / (r_m^2 theta_m^(1/2))`, unit-ball
    /// averages of value/gradient/Hessian (and time derivative) removed.
    pub v: ScalarField<G>,
    /// `g_m(x) = (f(r_m x) - mean) / theta_m^(1/2)`, zero mean on the unit
    /// region.
    pub g: ScalarField<G>,
    pub const_coef: f64,
    pub lin_coef: [f64; 3],
    /// Symmetric quadratic coefficients (component order of `sym_components`).
    pub quad_coef: Vec<f64>,
    pub time_coef: Option<f64>,
    /// Worst discrete unit-region average among value, gradient, Hessian
    /// (and dt) of `v`; the rescaling contract drives this to rounding.
    pub avg_defect: f64,
    /// Mean of `|D^2 v|_F^2` over the unit region; `1 - delta` up to
    /// interpolation error when `theta_m` came from the profile.
    pub hess_ms_unit: f64,
    /// For the parabolic mode, mean of `|dt v|^2` over the unit region
    /// (`hess_ms_unit + dt_ms_unit` is the normalized quantity).
    pub dt_ms_unit: f64,
    /// `L^2` norm of `v` over the double-size region (reported, not asserted).
    pub v_l2_b2: f64,
    /// Max-norm defect of the rescaled equation on the new grid.
    pub pde_residual: f64,
}

/// Clamped multilinear interpolation of a spatial field.
fn interp_spatial(field: &ScalarField<Domain>, x: &[f64]) -> f64 {
    let d = field.grid();
    let n = d.n();
    let h = d.h();
    let m = d.m();
    let mut base = [0usize; 3];
    let mut frac = [0.0f64; 3];
    for a in 0..n {
        let c = ((x[a] - d.lo()[a]) / h).clamp(0.0, (m - 1) as f64);
        let i = (c.floor() as usize).min(m - 2);
        base[a] = i;
        frac[a] = c - i as f64;
    }
    let mut acc = 0.0;
    for corner in 0..(1usize << n) {
        let mut idx = base;
        let mut w = 1.0;
        for a in 0..n {
            if corner & (1 << a) != 0 {
                idx[a] += 1;
                w *= frac[a];
            } else {
                w *= 1.0 - frac[a];
            }
        }
        acc += w * field.value(d.flat(idx));
    }
    acc
}

fn check_blowup_inputs(h_src: f64, half_width_src: f64, r_m: f64, theta_m: f64) -> Result<()> {
    if !theta_m.is_finite() || theta_m <= 0.0 {
        return Err(CzError::InvalidInput(format!(
            "blow-up normalizer must be positive, got {theta_m}"
        )));
    }
    let nodes_across = (2.0 * r_m / h_src).floor() as i64 + 1;
    if nodes_across < 16 {
        return Err(CzError::InvalidInput(format!(
            "radius {r_m} spans only {nodes_across} nodes on a grid with h = {h_src}"
        )));
    }
    if !r_m.is_finite() || r_m <= 0.0 || 2.0 * r_m > half_width_src {
        return Err(CzError::InvalidInput(format!(
            "radius {r_m} too large: the rescaled double ball must fit in the source box"
        )));
    }
    Ok(())
}

/// Target grid whose image lattice `r_m * x_i` lands exactly on source
/// nodes: spacing `h_src / r_m`, box half-width >= 2 (so B_2 fits), node
/// parity matched to the source so the image offset is a whole node.
fn aligned_target(src: &Domain, r_m: f64) -> Result<Domain> {
    let h_t = src.h() / r_m;
    let mut m_t = ((4.0 * r_m / src.h()).ceil() as usize + 1).max(8);
    if (src.m() % 2) != (m_t % 2) {
        m_t += 1;
    }
    let half = 0.5 * (m_t - 1) as f64 * h_t;
    Domain::symmetric_box(src.n(), half, m_t)
}

/// Elliptic blow-up rescaling:
/// `v(x) = (u(r_m x) - p_m(x)) / (r_m^2 sqrt(theta_m))` with `p_m` fit by
/// exact discrete moment matching on `B_1`, and
/// `g(x) = (f(r_m x) - mean_{B_1}) / sqrt(theta_m)`. The target grid is
/// aligned so resampling reads exact source-node values (no interpolation
/// kinks under the discrete Hessian).
pub fn blowup_rescale(
    pair: &SolutionPair<Domain>,
    r_m: f64,
    theta_m: f64,
) -> Result<BlowupState<Domain>> {
    let src = pair.u.grid();
    check_blowup_inputs(src.h(), src.half_width(), r_m, theta_m)?;
    let target = aligned_target(src, r_m)?;
    let n = target.n();
    let sqrt_theta = theta_m.sqrt();
    let denom = r_m * r_m * sqrt_theta;

    let w_raw = ScalarField::from_fn(target.clone(), |x| {
        let mut y = [0.0; 3];
        for a in 0..n {
            y[a] = r_m * x[a];
        }
        interp_spatial(&pair.u, &y[..n]) / denom
    })?;

    let unit = Region::ball([0.0; 3], 1.0);
    let comps = sym_components(n);

    // quadratic: kill the Hessian average (stencils are exact on quadratics,
    // so the remaining averages vanish to rounding)
    let quad_coef = region_average_tensor(&hessian(&w_raw)?, &unit)?;
    let w2 = w_raw.zip(
        &ScalarField::from_fn(target.clone(), |x| {
            let mut q = 0.0;
            for (c, &(a, b)) in comps.iter().enumerate() {
                let weight = if a == b { 0.5 } else { 1.0 };
                q += weight * quad_coef[c] * x[a] * x[b];
            }
            q
        })?,
        |w, q| w - q,
    )?;

    // linear: kill the gradient average
    let grads = gradient(&w2)?;
    let mut lin_coef = [0.0; 3];
    for a in 0..n {
        lin_coef[a] = region_average(&grads[a], &unit)?;
    }
    let w3 = w2.zip(
        &ScalarField::from_fn(target.clone(), |x| {
            (0..n).map(|a| lin_coef[a] * x[a]).sum::<f64>()
        })?,
        |w, l| w - l,
    )?;

    // constant: kill the value average
    let const_coef = region_average(&w3, &unit)?;
    let v = w3.map(|val| val - const_coef)?;

    let g_raw = ScalarField::from_fn(target.clone(), |x| {
        let mut y = [0.0; 3];
        for a in 0..n {
            y[a] = r_m * x[a];
        }
        interp_spatial(&pair.f, &y[..n]) / sqrt_theta
    })?;
    let g_mean = region_average(&g_raw, &unit)?;
    let g = g_raw.map(|val| val - g_mean)?;

    // diagnostics
    let mut avg_defect = region_average(&v, &unit)?.abs();
    for gr in gradient(&v)? {
        avg_defect = avg_defect.max(region_average(&gr, &unit)?.abs());
    }
    let hess_v = hessian(&v)?;
    for mean in region_average_tensor(&hess_v, &unit)? {
        avg_defect = avg_defect.max(mean.abs());
    }
    let hess_ms_unit = mean_square_tensor(&hess_v, &unit)?;
    let v_l2_b2 = lp_norm(&v, &Region::ball([0.0; 3], 2.0), 2.0)?;
    let pde_residual =
        crate::fields::deriv::interior_max_abs(&laplacian(&v)?.sub(&g)?, 1);

    Ok(BlowupState {
        r_m,
        theta_m,
        v,
        g,
        const_coef,
        lin_coef,
        quad_coef,
        time_coef: None,
        avg_defect,
        hess_ms_unit,
        dt_ms_unit: 0.0,
        v_l2_b2,
        pde_residual,
    })
}

/// Multilinear interpolation in space and time.
fn interp_spacetime(field: &ScalarField<SpaceTimeDomain>, x: &[f64], t: f64) -> f64 {
    let grid = field.grid();
    let nt = grid.nt();
    let c = ((t - grid.t_lo()) / grid.tau()).clamp(0.0, (nt - 1) as f64);
    let k = (c.floor() as usize).min(nt - 2);
    let frac = c - k as f64;
    let lo = interp_spatial(&field.slice_field(k).expect("slice"), x);
    let hi = interp_spatial(&field.slice_field(k + 1).expect("slice"), x);
    lo * (1.0 - frac) + hi * frac
}

/// Aligned space-time target: spatial alignment as in the elliptic case,
/// plus a time lattice of spacing `tau_src / r_m^2` whose image lands on
/// source slices.
fn aligned_target_xt(src: &SpaceTimeDomain, r_m: f64) -> Result<SpaceTimeDomain> {
    let space = aligned_target(src.space(), r_m)?;
    let r2 = r_m * r_m;
    let tau_t = src.tau() / r2;
    let mut nt_t = ((4.0 * r2 / src.tau()).ceil() as usize + 1).max(8);
    if (src.nt() % 2) != (nt_t % 2) {
        nt_t += 1;
    }
    let half = 0.5 * (nt_t - 1) as f64 * tau_t;
    SpaceTimeDomain::new(space, -half, half, nt_t)
}

/// Parabolic blow-up rescaling:
/// `v(x, t) = (u(r_m x, r_m^2 t) - p_m(x, t)) / (r_m^2 sqrt(theta_m))` with
/// `p_m` quadratic in `x` and linear in `t`, averages over `Q_1` removed.
pub fn blowup_rescale_parabolic(
    pair: &SolutionPair<SpaceTimeDomain>,
    r_m: f64,
    theta_m: f64,
) -> Result<BlowupState<SpaceTimeDomain>> {
    let src = pair.u.grid();
    check_blowup_inputs(src.space().h(), src.space().half_width(), r_m, theta_m)?;
    if 2.0 * r_m * r_m * 2.0 > src.t_hi() - src.t_lo() {
        return Err(CzError::InvalidInput(format!(
            "radius {r_m} too large: the rescaled double cube leaves the source time range"
        )));
    }
    let target = aligned_target_xt(src, r_m)?;
    let n = target.space().n();
    let sqrt_theta = theta_m.sqrt();
    let denom = r_m * r_m * sqrt_theta;
    let r2 = r_m * r_m;

    let w_raw = ScalarField::from_fn_xt(target.clone(), |x, t| {
        let mut y = [0.0; 3];
        for a in 0..n {
            y[a] = r_m * x[a];
        }
        interp_spacetime(&pair.u, &y[..n], r2 * t) / denom
    })?;

    let unit = Region::cube([0.0; 3], 0.0, 1.0);
    let comps = sym_components(n);

    let quad_coef = region_average_tensor(&hessian(&w_raw)?, &unit)?;
    let w2 = w_raw.zip(
        &ScalarField::from_fn_xt(target.clone(), |x, _| {
            let mut q = 0.0;
            for (c, &(a, b)) in comps.iter().enumerate() {
                let weight = if a == b { 0.5 } else { 1.0 };
                q += weight * quad_coef[c] * x[a] * x[b];
            }
            q
        })?,
        |w, q| w - q,
    )?;

    let time_coef = region_average(&dt(&w2)?, &unit)?;
    let w3 = w2.zip(
        &ScalarField::from_fn_xt(target.clone(), |_, t| time_coef * t)?,
        |w, q| w - q,
    )?;

    let grads = gradient(&w3)?;
    let mut lin_coef = [0.0; 3];
    for a in 0..n {
        lin_coef[a] = region_average(&grads[a], &unit)?;
    }
    let w4 = w3.zip(
        &ScalarField::from_fn_xt(target.clone(), |x, _| {
            (0..n).map(|a| lin_coef[a] * x[a]).sum::<f64>()
        })?,
        |w, l| w - l,
    )?;

    let const_coef = region_average(&w4, &unit)?;
    let v = w4.map(|val| val - const_coef)?;

    let g_raw = ScalarField::from_fn_xt(target.clone(), |x, t| {
        let mut y = [0.0; 3];
        for a in 0..n {
            y[a] = r_m * x[a];
        }
        interp_spacetime(&pair.f, &y[..n], r2 * t) / sqrt_theta
    })?;
    let g_mean = region_average(&g_raw, &unit)?;
    let g = g_raw.map(|val| val - g_mean)?;

    let mut avg_defect = region_average(&v, &unit)?.abs();
    for gr in gradient(&v)? {
        avg_defect = avg_defect.max(region_average(&gr, &unit)?.abs());
    }
    avg_defect = avg_defect.max(region_average(&dt(&v)?, &unit)?.abs());
    let hess_v = hessian(&v)?;
    for mean in region_average_tensor(&hess_v, &unit)? {
        avg_defect = avg_defect.max(mean.abs());
    }
    let hess_ms_unit = mean_square_tensor(&hess_v, &unit)?;
    let dtv = dt(&v)?;
    let dt_ms_unit = {
        let nodes = crate::fields::region::region_nodes(&target, &unit)?;
        let mut s = 0.0;
        for &i in &nodes {
            let d = dtv.value(i);
            s += d * d;
        }
        s / nodes.len() as f64
    };
    let v_l2_b2 = lp_norm(&v, &Region::cube([0.0; 3], 0.0, 2.0), 2.0)?;
    let pde_residual = crate::fields::deriv::interior_max_abs(
        &dtv.sub(&laplacian(&v)?)?.sub(&g)?,
        1,
    );

    Ok(BlowupState {
        r_m,
        theta_m,
        v,
        g,
        const_coef,
        lin_coef,
        quad_coef,
        time_coef: Some(time_coef),
        avg_defect,
        hess_ms_unit,
        dt_ms_unit,
        v_l2_b2,
        pde_residual,
    })
}
