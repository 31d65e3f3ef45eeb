//! Analytic solution recipes with closed-form Laplacians (and heat
//! right-hand sides), used to manufacture solution pairs.

use crate::error::{CzError, Result};
use crate::fields::domain::{Domain, SpaceTimeDomain};
use crate::fields::scalar::ScalarField;

/// Elliptic recipes: `u` with a closed-form `lap u`.
#[derive(Clone, Debug, PartialEq)]
pub enum Recipe {
    /// `u = |x|^2 / (2n)`, `lap u = 1`.
    QuadraticRadial,
    /// `u = x1^2 - x2^2`, harmonic (n >= 2).
    HarmonicSaddle,
    /// `Re` or `Im` of `(x1 + i x2)^d`, harmonic (n = 2).
    HarmonicPoly { degree: u32, imag: bool },
    /// `prod_a sin(k_a pi x_a)`, `lap u = -pi^2 |k|^2 u`.
    TrigProduct { freq: [u32; 3] },
    /// `A (1 - |x - c|^2 / R^2)_+^q`, compactly supported in `B_R(c)`.
    Bump {
        power: u32,
        radius: f64,
        center: [f64; 3],
        amplitude: f64,
    },
    /// `(1 - |x|^2)_+^q * x1`, compactly supported, odd in `x1`.
    BumpTimesX1 { power: u32 },
    /// `u = x1 x2 log|x|` (n = 2), `lap u = 4 x1 x2 / |x|^2` which is bounded
    /// by 2 while `D^2 u` blows up like `log|x|`; both are zeroed at a node
    /// sitting exactly on the origin.
    LogSaddle,
    /// `c * x^alpha` with the componentwise polynomial Laplacian.
    Monomial { powers: [u32; 3], coef: f64 },
}

fn powi(x: f64, k: u32) -> f64 {
    x.powi(k as i32)
}

impl Recipe {
    pub fn eval(&self, n: usize, x: &[f64]) -> f64 {
        match self {
            Recipe::QuadraticRadial => {
                let r2: f64 = x[..n].iter().map(|v| v * v).sum();
                r2 / (2.0 * n as f64)
            }
            Recipe::HarmonicSaddle => x[0] * x[0] - x[1] * x[1],
            Recipe::HarmonicPoly { degree, imag } => {
                let (mut re, mut im) = (1.0f64, 0.0f64);
                for _ in 0..*degree {
                    let nre = re * x[0] - im * x[1];
                    im = re * x[1] + im * x[0];
                    re = nre;
                }
                if *imag {
                    im
                } else {
                    re
                }
            }
            Recipe::TrigProduct { freq } => {
                let mut u = 1.0;
                for a in 0..n {
                    u *= (freq[a] as f64 * std::f64::consts::PI * x[a]).sin();
                }
                u
            }
            Recipe::Bump {
                power,
                radius,
                center,
                amplitude,
            } => {
                let mut r2 = 0.0;
                for a in 0..n {
                    let d = x[a] - center[a];
                    r2 += d * d;
                }
                let s = 1.0 - r2 / (radius * radius);
                if s > 0.0 {
                    amplitude * powi(s, *power)
                } else {
                    0.0
                }
            }
            Recipe::BumpTimesX1 { power } => {
                let r2: f64 = x[..n].iter().map(|v| v * v).sum();
                let s = 1.0 - r2;
                if s > 0.0 {
                    powi(s, *power) * x[0]
                } else {
                    0.0
                }
            }
            Recipe::LogSaddle => {
                let r2 = x[0] * x[0] + x[1] * x[1];
                if r2 == 0.0 {
                    0.0
                } else {
                    x[0] * x[1] * 0.5 * r2.ln()
                }
            }
            Recipe::Monomial { powers, coef } => {
                let mut u = *coef;
                for a in 0..n {
                    u *= powi(x[a], powers[a]);
                }
                u
            }
        }
    }

    pub fn laplacian(&self, n: usize, x: &[f64]) -> f64 {
        match self {
            Recipe::QuadraticRadial => 1.0,
            Recipe::HarmonicSaddle | Recipe::HarmonicPoly { .. } => 0.0,
            Recipe::TrigProduct { freq } => {
                let k2: f64 = (0..n).map(|a| (freq[a] * freq[a]) as f64).sum();
                -std::f64::consts::PI * std::f64::consts::PI * k2 * self.eval(n, x)
            }
            Recipe::Bump {
                power,
                radius,
                center,
                amplitude,
            } => {
                let q = *power as f64;
                let r2inv = 1.0 / (radius * radius);
                let mut d2 = 0.0;
                for a in 0..n {
                    let d = x[a] - center[a];
                    d2 += d * d;
                }
                let s = 1.0 - d2 * r2inv;
                if s <= 0.0 {
                    return 0.0;
                }
                // lap (s^q) with s = 1 - |x-c|^2/R^2:
                //   q(q-1) s^{q-2} |grad s|^2 + q s^{q-1} lap s
                let grad2 = 4.0 * d2 * r2inv * r2inv;
                let lap_s = -2.0 * n as f64 * r2inv;
                let curvature = if *power >= 2 {
                    q * (q - 1.0) * powi(s, *power - 2) * grad2
                } else {
                    0.0
                };
                amplitude * (curvature + q * powi(s, *power - 1) * lap_s)
            }
            Recipe::BumpTimesX1 { power } => {
                let q = *power as f64;
                let r2: f64 = x[..n].iter().map(|v| v * v).sum();
                let s = 1.0 - r2;
                if s <= 0.0 {
                    return 0.0;
                }
                // lap (B x1) = x1 lap B + 2 d1 B, with B = s^q
                let curvature = if *power >= 2 {
                    q * (q - 1.0) * powi(s, *power - 2) * 4.0 * r2
                } else {
                    0.0
                };
                let lap_b = curvature - q * powi(s, *power - 1) * 2.0 * n as f64;
                let d1_b = -2.0 * q * powi(s, *power - 1) * x[0];
                x[0] * lap_b + 2.0 * d1_b
            }
            Recipe::LogSaddle => {
                let r2 = x[0] * x[0] + x[1] * x[1];
                if r2 == 0.0 {
                    0.0
                } else {
                    4.0 * x[0] * x[1] / r2
                }
            }
            Recipe::Monomial { powers, coef } => {
                let mut lap = 0.0;
                for a in 0..n {
                    let p = powers[a];
                    if p >= 2 {
                        let mut term = *coef * (p * (p - 1)) as f64 * powi(x[a], p - 2);
                        for b in 0..n {
                            if b != a {
                                term *= powi(x[b], powers[b]);
                            }
                        }
                        lap += term;
                    }
                }
                lap
            }
        }
    }

    pub fn sample_u(&self, domain: &Domain) -> Result<ScalarField<Domain>> {
        ScalarField::from_fn(domain.clone(), |x| self.eval(domain.n(), x))
    }

    pub fn sample_f(&self, domain: &Domain) -> Result<ScalarField<Domain>> {
        ScalarField::from_fn(domain.clone(), |x| self.laplacian(domain.n(), x))
    }

    /// Parse the CLI recipe syntax. Recognized forms:
    /// `quadratic`, `harmonic`, `harmonic:D[i]`, `trig:K1[,K2[,K3]]`,
    /// `sin(pi*x1)*sin(pi*x2)`, `bump:Q[:R]`, `bumpx1:Q`, `logsaddle`,
    /// `monomial:P1[,P2[,P3]]`.
    pub fn parse(s: &str) -> Result<Recipe> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("u=") {
            return Self::parse(rest);
        }
        if s == "quadratic" {
            return Ok(Recipe::QuadraticRadial);
        }
        if s == "harmonic" {
            return Ok(Recipe::HarmonicSaddle);
        }
        if s == "logsaddle" || s == "x1*x2*log|x|" {
            return Ok(Recipe::LogSaddle);
        }
        if let Some(spec) = s.strip_prefix("harmonic:") {
            let imag = spec.ends_with('i');
            let num = spec.trim_end_matches('i');
            let degree: u32 = num
                .parse()
                .map_err(|_| CzError::InvalidInput(format!("bad harmonic degree in '{s}'")))?;
            return Ok(Recipe::HarmonicPoly { degree, imag });
        }
        if let Some(spec) = s.strip_prefix("trig:") {
            let mut freq = [0u32; 3];
            for (a, tok) in spec.split(',').enumerate() {
                if a >= 3 {
                    return Err(CzError::InvalidInput(format!("too many frequencies in '{s}'")));
                }
                freq[a] = tok
                    .trim()
                    .parse()
                    .map_err(|_| CzError::InvalidInput(format!("bad frequency in '{s}'")))?;
            }
            return Ok(Recipe::TrigProduct { freq });
        }
        if let Some(spec) = s.strip_prefix("bump:") {
            let mut parts = spec.split(':');
            let power: u32 = parts
                .next()
                .unwrap()
                .parse()
                .map_err(|_| CzError::InvalidInput(format!("bad bump power in '{s}'")))?;
            let radius: f64 = match parts.next() {
                Some(tok) => tok
                    .parse()
                    .map_err(|_| CzError::InvalidInput(format!("bad bump radius in '{s}'")))?,
                None => 1.0,
            };
            return Ok(Recipe::Bump {
                power,
                radius,
                center: [0.0; 3],
                amplitude: 1.0,
            });
        }
        if let Some(spec) = s.strip_prefix("bumpx1:") {
            let power: u32 = spec
                .parse()
                .map_err(|_| CzError::InvalidInput(format!("bad bump power in '{s}'")))?;
            return Ok(Recipe::BumpTimesX1 { power });
        }
        if let Some(spec) = s.strip_prefix("monomial:") {
            let mut powers = [0u32; 3];
            for (a, tok) in spec.split(',').enumerate() {
                if a >= 3 {
                    return Err(CzError::InvalidInput(format!("too many exponents in '{s}'")));
                }
                powers[a] = tok
                    .trim()
                    .parse()
                    .map_err(|_| CzError::InvalidInput(format!("bad exponent in '{s}'")))?;
            }
            return Ok(Recipe::Monomial { powers, coef: 1.0 });
        }
        // literal sin-product syntax, e.g. sin(pi*x1)*sin(2*pi*x2)
        if s.starts_with("sin(") {
            let mut freq = [0u32; 3];
            for factor in s.split("*sin") {
                let inner = factor
                    .trim_start_matches("sin")
                    .trim_start_matches('(')
                    .trim_end_matches(')');
                let (k, axis) = parse_sin_arg(inner)
                    .ok_or_else(|| CzError::InvalidInput(format!("unrecognized recipe '{s}'")))?;
                if axis == 0 || axis > 3 {
                    return Err(CzError::InvalidInput(format!("bad axis in '{s}'")));
                }
                freq[axis - 1] = k;
            }
            return Ok(Recipe::TrigProduct { freq });
        }
        Err(CzError::InvalidInput(format!("unrecognized recipe '{s}'")))
    }

    pub fn describe(&self) -> String {
        match self {
            Recipe::QuadraticRadial => "u = |x|^2/(2n)".into(),
            Recipe::HarmonicSaddle => "u = x1^2 - x2^2".into(),
            Recipe::HarmonicPoly { degree, imag } => {
                format!("u = {}((x1 + i x2)^{degree})", if *imag { "Im" } else { "Re" })
            }
            Recipe::TrigProduct { freq } => format!("u = prod sin(k_a pi x_a), k = {freq:?}"),
            Recipe::Bump { power, radius, .. } => {
                format!("u = (1 - |x|^2/{radius}^2)_+^{power}")
            }
            Recipe::BumpTimesX1 { power } => format!("u = (1 - |x|^2)_+^{power} x1"),
            Recipe::LogSaddle => "u = x1 x2 log|x|".into(),
            Recipe::Monomial { powers, coef } => format!("u = {coef} x^{powers:?}"),
        }
    }
}

/// Parse `k*pi*xA` or `pi*xA` into `(k, A)`.
fn parse_sin_arg(s: &str) -> Option<(u32, usize)> {
    let s = s.trim();
    let (k, rest) = if let Some(rest) = s.strip_prefix("pi*") {
        (1, rest)
    } else {
        let (num, rest) = s.split_once("*pi*")?;
        (num.trim().parse().ok()?, rest)
    };
    let axis: usize = rest.trim().strip_prefix('x')?.parse().ok()?;
    Some((k, axis))
}

/// Heat-equation recipes: `u(x, t)` with closed-form `f = u_t - lap u`.
#[derive(Clone, Debug, PartialEq)]
pub enum HeatRecipe {
    /// `u = t`, `f = 1`.
    LinearTime,
    /// `u = x1^2 + 2t`, caloric (`f = 0`).
    CaloricQuadratic,
    /// `u = t + |x|^2/(2n)`, `f = 0`; constant time and space derivatives.
    DriftQuadratic,
    /// `u = exp(-pi^2 |k|^2 t) prod sin(k_a pi x_a)`, caloric.
    DecayMode { freq: [u32; 3] },
    /// `u = t * prod sin(k_a pi x_a)`, `f = (1 + pi^2 |k|^2 t) prod sin`.
    RampMode { freq: [u32; 3] },
    /// `u = t * bump(x)`, `f = bump - t lap bump`; zero initial data and
    /// compact spatial support.
    RampBump {
        power: u32,
        radius: f64,
        center: [f64; 3],
        amplitude: f64,
    },
    /// `u = t^k * bump(x)` with `k >= 2`: zero initial data, compact spatial
    /// support and genuine time curvature (the k = 1 ramp is exact under
    /// every second-order time stencil).
    PowerRampBump {
        tpow: u32,
        power: u32,
        radius: f64,
        center: [f64; 3],
        amplitude: f64,
    },
}

impl HeatRecipe {
    pub fn eval(&self, n: usize, x: &[f64], t: f64) -> f64 {
        match self {
            HeatRecipe::LinearTime => t,
            HeatRecipe::CaloricQuadratic => x[0] * x[0] + 2.0 * t,
            HeatRecipe::DriftQuadratic => {
                let r2: f64 = x[..n].iter().map(|v| v * v).sum();
                t + r2 / (2.0 * n as f64)
            }
            HeatRecipe::DecayMode { freq } => {
                let k2: f64 = (0..n).map(|a| (freq[a] * freq[a]) as f64).sum();
                let pi2 = std::f64::consts::PI * std::f64::consts::PI;
                (-pi2 * k2 * t).exp() * Recipe::TrigProduct { freq: *freq }.eval(n, x)
            }
            HeatRecipe::RampMode { freq } => t * Recipe::TrigProduct { freq: *freq }.eval(n, x),
            HeatRecipe::RampBump {
                power,
                radius,
                center,
                amplitude,
            } => {
                t * Recipe::Bump {
                    power: *power,
                    radius: *radius,
                    center: *center,
                    amplitude: *amplitude,
                }
                .eval(n, x)
            }
            HeatRecipe::PowerRampBump {
                tpow,
                power,
                radius,
                center,
                amplitude,
            } => {
                t.powi(*tpow as i32)
                    * Recipe::Bump {
                        power: *power,
                        radius: *radius,
                        center: *center,
                        amplitude: *amplitude,
                    }
                    .eval(n, x)
            }
        }
    }

    /// `f = u_t - lap u`.
    pub fn rhs(&self, n: usize, x: &[f64], t: f64) -> f64 {
        match self {
            HeatRecipe::LinearTime => 1.0,
            HeatRecipe::CaloricQuadratic | HeatRecipe::DriftQuadratic => 0.0,
            HeatRecipe::DecayMode { .. } => 0.0,
            HeatRecipe::RampMode { freq } => {
                let k2: f64 = (0..n).map(|a| (freq[a] * freq[a]) as f64).sum();
                let pi2 = std::f64::consts::PI * std::f64::consts::PI;
                let s = Recipe::TrigProduct { freq: *freq }.eval(n, x);
                (1.0 + pi2 * k2 * t) * s
            }
            HeatRecipe::RampBump {
                power,
                radius,
                center,
                amplitude,
            } => {
                let bump = Recipe::Bump {
                    power: *power,
                    radius: *radius,
                    center: *center,
                    amplitude: *amplitude,
                };
                bump.eval(n, x) - t * bump.laplacian(n, x)
            }
            HeatRecipe::PowerRampBump {
                tpow,
                power,
                radius,
                center,
                amplitude,
            } => {
                let bump = Recipe::Bump {
                    power: *power,
                    radius: *radius,
                    center: *center,
                    amplitude: *amplitude,
                };
                let k = *tpow;
                k as f64 * t.powi(k as i32 - 1) * bump.eval(n, x)
                    - t.powi(k as i32) * bump.laplacian(n, x)
            }
        }
    }

    pub fn sample_u(&self, grid: &SpaceTimeDomain) -> Result<ScalarField<SpaceTimeDomain>> {
        let n = grid.space().n();
        ScalarField::from_fn_xt(grid.clone(), |x, t| self.eval(n, x, t))
    }

    pub fn sample_f(&self, grid: &SpaceTimeDomain) -> Result<ScalarField<SpaceTimeDomain>> {
        let n = grid.space().n();
        ScalarField::from_fn_xt(grid.clone(), |x, t| self.rhs(n, x, t))
    }
}

/// Capped singular profile `min(|x|, floor)^{-beta}` with `floor = h`: the
/// value at nodes closer than `h` to the origin is replaced by the value at
/// distance `h`, keeping the sampled field finite.
pub fn capped_radial_power(domain: &Domain, beta: f64) -> Result<ScalarField<Domain>> {
    let h = domain.h();
    let n = domain.n();
    ScalarField::from_fn(domain.clone(), |x| {
        let r = x[..n].iter().map(|v| v * v).sum::<f64>().sqrt().max(h);
        r.powf(-beta)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::deriv::{interior_max_abs, laplacian};

    #[test]
    fn parse_round_trips() {
        assert_eq!(Recipe::parse("quadratic").unwrap(), Recipe::QuadraticRadial);
        assert_eq!(
            Recipe::parse("u=sin(pi*x1)*sin(pi*x2)").unwrap(),
            Recipe::TrigProduct { freq: [1, 1, 0] }
        );
        assert_eq!(
            Recipe::parse("trig:2,3").unwrap(),
            Recipe::TrigProduct { freq: [2, 3, 0] }
        );
        assert_eq!(
            Recipe::parse("harmonic:4i").unwrap(),
            Recipe::HarmonicPoly {
                degree: 4,
                imag: true
            }
        );
        assert!(Recipe::parse("nonsense").is_err());
    }

    #[test]
    fn analytic_laplacians_match_discrete_ones() {
        let d = Domain::unit_lab(2, 97).unwrap();
        let recipes = [
            Recipe::TrigProduct { freq: [1, 2, 0] },
            Recipe::Bump {
                power: 4,
                radius: 1.0,
                center: [0.1, -0.2, 0.0],
                amplitude: 2.0,
            },
            Recipe::BumpTimesX1 { power: 4 },
            Recipe::Monomial {
                powers: [3, 2, 0],
                coef: 0.5,
            },
            Recipe::HarmonicPoly {
                degree: 5,
                imag: false,
            },
        ];
        for recipe in recipes {
            let u = recipe.sample_u(&d).unwrap();
            let f = recipe.sample_f(&d).unwrap();
            let resid = laplacian(&u).unwrap().sub(&f).unwrap();
            let err = interior_max_abs(&resid, 1);
            assert!(err < 2.0, "{recipe:?}: residual {err}");
            // refine: halved spacing contracts the residual ~4x
            let d2 = Domain::unit_lab(2, 193).unwrap();
            let u2 = recipe.sample_u(&d2).unwrap();
            let f2 = recipe.sample_f(&d2).unwrap();
            let err2 = interior_max_abs(&laplacian(&u2).unwrap().sub(&f2).unwrap(), 1);
            assert!(
                err2 < 0.4 * err + 1e-9,
                "{recipe:?}: no contraction {err} -> {err2}"
            );
        }
    }

    #[test]
    fn log_saddle_rhs_is_bounded_by_two() {
        let d = Domain::unit_lab(2, 128).unwrap();
        let f = Recipe::LogSaddle.sample_f(&d).unwrap();
        assert!(f.max_abs() <= 2.0 + 1e-6, "max |f| = {}", f.max_abs());
    }

    #[test]
    fn heat_recipes_satisfy_the_discrete_equation() {
        use crate::fields::deriv::dt;
        let st = SpaceTimeDomain::new(Domain::unit_lab(2, 49).unwrap(), -2.0, 2.0, 49).unwrap();
        for recipe in [
            HeatRecipe::LinearTime,
            HeatRecipe::CaloricQuadratic,
            HeatRecipe::DriftQuadratic,
            HeatRecipe::RampMode { freq: [1, 1, 0] },
        ] {
            let u = recipe.sample_u(&st).unwrap();
            let f = recipe.sample_f(&st).unwrap();
            let resid = dt(&u)
                .unwrap()
                .sub(&laplacian(&u).unwrap())
                .unwrap()
                .sub(&f)
                .unwrap();
            let err = interior_max_abs(&resid, 1);
            let tol = match recipe {
                // quadratic in x, linear in t: stencils exact
                HeatRecipe::LinearTime
                | HeatRecipe::CaloricQuadratic
                | HeatRecipe::DriftQuadratic => 1e-9,
                _ => 1.5,
            };
            assert!(err < tol, "{recipe:?}: residual {err}");
        }
    }

    #[test]
    fn capped_field_is_finite_and_large_near_origin() {
        let d = Domain::unit_lab(2, 64).unwrap();
        let f = capped_radial_power(&d, 0.5).unwrap();
        assert!(f.max_abs() <= d.h().powf(-0.5) + 1e-12);
        assert!(f.max_abs() > 1.0);
    }
}
