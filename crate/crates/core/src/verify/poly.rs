//! Growth of centered polynomial oscillations over parabolic cubes:
//! `avg_{Q_R} |p - mean|^2` scales like `c R^{2N}` where `N` is the parabolic
//! degree (space degree + twice the time degree).

use super::report::{inputs_hash, EstimateReport, GridMeta, Term};
use crate::error::{CzError, Result};
use crate::fields::domain::SpaceTimeDomain;
use crate::fields::region::Region;
use crate::fields::scalar::ScalarField;
use crate::maximal::{local_oscillation2, MaximalInput};

#[derive(Clone, Debug, PartialEq)]
pub struct MonomialXt {
    pub coef: f64,
    pub powers: [u32; 3],
    pub tpow: u32,
}

impl MonomialXt {
    pub fn parabolic_degree(&self) -> u32 {
        self.powers.iter().sum::<u32>() + 2 * self.tpow
    }
}

/// Polynomial in `(x, t)` as a sum of monomials.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyXt {
    pub terms: Vec<MonomialXt>,
}

impl PolyXt {
    pub fn monomial(coef: f64, powers: [u32; 3], tpow: u32) -> Self {
        Self {
            terms: vec![MonomialXt { coef, powers, tpow }],
        }
    }

    pub fn eval(&self, n: usize, x: &[f64], t: f64) -> f64 {
        self.terms
            .iter()
            .map(|m| {
                let mut v = m.coef * t.powi(m.tpow as i32);
                for a in 0..n {
                    v *= x[a].powi(m.powers[a] as i32);
                }
                v
            })
            .sum()
    }

    /// Max over monomials of (space degree + 2 * time degree).
    pub fn parabolic_degree(&self) -> u32 {
        self.terms
            .iter()
            .map(MonomialXt::parabolic_degree)
            .max()
            .unwrap_or(0)
    }

    pub fn describe(&self) -> String {
        self.terms
            .iter()
            .map(|m| format!("{}x^{:?}t^{}", m.coef, m.powers, m.tpow))
            .collect::<Vec<_>>()
            .join("+")
    }
}

const DEGENERATE_OSC: f64 = 1e-14;

/// Measure `avg_{Q_R} |p - c_R|^2` (with `c_R` the minimizing constant, the
/// mean) over the radius ladder and fit the growth exponent `sigma` of
/// `c R^sigma` by least squares in log-log; `sigma` should match twice the
/// parabolic degree.
pub fn poly_growth_check(
    poly: &PolyXt,
    grid: &SpaceTimeDomain,
    r_ladder: &[f64],
    level: usize,
) -> Result<EstimateReport> {
    if r_ladder.len() < 3 {
        return Err(CzError::InvalidInput(format!(
            "radius ladder needs at least 3 values, got {}",
            r_ladder.len()
        )));
    }
    let n = grid.space().n();
    let field = ScalarField::from_fn_xt(grid.clone(), |x, t| poly.eval(n, x, t))?;
    let degree = poly.parabolic_degree();

    let mut oscs = Vec::with_capacity(r_ladder.len());
    let mut extra = Vec::new();
    for &r in r_ladder {
        let osc = local_oscillation2(
            MaximalInput::Scalar(&field),
            &Region::cube([0.0; 3], 0.0, r),
        )?;
        extra.push(Term::new(format!("osc_at_{r}"), osc));
        oscs.push(osc);
    }

    let scale = poly
        .terms
        .iter()
        .map(|m| m.coef.abs())
        .fold(0.0f64, f64::max)
        .powi(2);
    if oscs.iter().all(|&o| o <= DEGENERATE_OSC * scale.max(1.0)) {
        // constant polynomial: zero oscillation at every radius, exponent
        // undefined
        return Ok(EstimateReport {
            experiment: "poly_growth_check".into(),
            label: poly.describe(),
            grid: GridMeta::of(grid),
            refinement_level: level,
            p: None,
            seed: None,
            points: r_ladder.len(),
            lhs: 0.0,
            rhs_terms: vec![Term::new("expected_exponent", 2.0 * degree as f64)],
            rhs: 2.0 * degree as f64,
            ratio: 0.0,
            degenerate: true,
            extra,
            inputs_hash: inputs_hash(&["polygrowth", &poly.describe()]),
        });
    }

    // least squares on log osc = sigma log R + log c
    let m = r_ladder.len() as f64;
    let xs: Vec<f64> = r_ladder.iter().map(|r| r.ln()).collect();
    let ys: Vec<f64> = oscs.iter().map(|o| o.ln()).collect();
    let xbar = xs.iter().sum::<f64>() / m;
    let ybar = ys.iter().sum::<f64>() / m;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        sxx += (x - xbar) * (x - xbar);
        sxy += (x - xbar) * (y - ybar);
    }
    let sigma = sxy / sxx;
    let c = (ybar - sigma * xbar).exp();
    let expected = 2.0 * degree as f64;

    extra.push(Term::new("fitted_constant", c));
    Ok(EstimateReport {
        experiment: "poly_growth_check".into(),
        label: poly.describe(),
        grid: GridMeta::of(grid),
        refinement_level: level,
        p: None,
        seed: None,
        points: r_ladder.len(),
        lhs: sigma,
        rhs_terms: vec![Term::new("expected_exponent", expected)],
        rhs: expected,
        ratio: if expected > 0.0 { sigma / expected } else { 0.0 },
        degenerate: false,
        extra,
        inputs_hash: inputs_hash(&["polygrowth", &poly.describe()]),
    })
}
