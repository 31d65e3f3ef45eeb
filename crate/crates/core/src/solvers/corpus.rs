//! Seeded corpus of analytic solution pairs. Items are drawn as continuum
//! functions (grid-independent parameters), so the same seed produces the
//! same functions at every refinement level, bitwise.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Deserialize;

use super::{Provenance, SolutionPair};
use crate::error::Result;
use crate::fields::deriv::{dt, interior_max_abs, laplacian};
use crate::fields::domain::{Domain, SpaceTimeDomain};
use crate::fields::scalar::ScalarField;
use crate::solvers::recipe::Recipe;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CorpusFamily {
    TrigPolynomial,
    RadialPower,
    Bump,
}

#[derive(Clone, Debug, Deserialize)]
pub struct CorpusSpec {
    pub seed: u64,
    pub count: usize,
    pub family: CorpusFamily,
    /// Mode amplitudes scale like `|k|^-decay`.
    #[serde(default = "default_decay")]
    pub decay: f64,
    /// Uniform range of the leading amplitude.
    #[serde(default = "default_amplitude")]
    pub amplitude: (f64, f64),
    /// Highest frequency per axis in the trig family.
    #[serde(default = "default_modes")]
    pub modes: usize,
}

fn default_decay() -> f64 {
    3.0
}

fn default_amplitude() -> (f64, f64) {
    (0.5, 1.5)
}

fn default_modes() -> usize {
    3
}

/// splitmix64 step, used to derive independent per-item seeds.
fn mix_seed(seed: u64, item: u64) -> u64 {
    let mut z = seed ^ item.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// One trigonometric mode `amp * prod_a sin(omega_a x_a + phase_a)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigTerm {
    pub amp: f64,
    pub omega: [f64; 3],
    pub phase: [f64; 3],
}

impl TrigTerm {
    fn eval(&self, n: usize, x: &[f64]) -> f64 {
        let mut v = self.amp;
        for a in 0..n {
            v *= (self.omega[a] * x[a] + self.phase[a]).sin();
        }
        v
    }

    fn laplacian(&self, n: usize, x: &[f64]) -> f64 {
        let k2: f64 = (0..n).map(|a| self.omega[a] * self.omega[a]).sum();
        -k2 * self.eval(n, x)
    }
}

/// Continuum corpus function with a closed-form Laplacian.
#[derive(Clone, Debug, PartialEq)]
pub enum CorpusFunction {
    Trig(Vec<TrigTerm>),
    /// `amp (c2 + |x - center|^2)^q`
    RadialPower {
        amp: f64,
        c2: f64,
        q: f64,
        center: [f64; 3],
    },
    Bump(Recipe),
}

impl CorpusFunction {
    pub fn eval(&self, n: usize, x: &[f64]) -> f64 {
        match self {
            CorpusFunction::Trig(terms) => terms.iter().map(|t| t.eval(n, x)).sum(),
            CorpusFunction::RadialPower { amp, c2, q, center } => {
                let mut r2 = 0.0;
                for a in 0..n {
                    let d = x[a] - center[a];
                    r2 += d * d;
                }
                amp * (c2 + r2).powf(*q)
            }
            CorpusFunction::Bump(recipe) => recipe.eval(n, x),
        }
    }

    pub fn laplacian(&self, n: usize, x: &[f64]) -> f64 {
        match self {
            CorpusFunction::Trig(terms) => terms.iter().map(|t| t.laplacian(n, x)).sum(),
            CorpusFunction::RadialPower { amp, c2, q, center } => {
                // lap (s^q), s = c2 + r^2: 2nq s^{q-1} + 4q(q-1) s^{q-2} r^2
                let mut r2 = 0.0;
                for a in 0..n {
                    let d = x[a] - center[a];
                    r2 += d * d;
                }
                let s = c2 + r2;
                amp * (2.0 * n as f64 * q * s.powf(q - 1.0)
                    + 4.0 * q * (q - 1.0) * s.powf(q - 2.0) * r2)
            }
            CorpusFunction::Bump(recipe) => recipe.laplacian(n, x),
        }
    }

    pub fn sample_pair(&self, domain: &Domain) -> Result<SolutionPair<Domain>> {
        let n = domain.n();
        let u = ScalarField::from_fn(domain.clone(), |x| self.eval(n, x))?;
        let f = ScalarField::from_fn(domain.clone(), |x| self.laplacian(n, x))?;
        let residual = interior_max_abs(&laplacian(&u)?.sub(&f)?, 1);
        Ok(SolutionPair {
            u,
            f,
            provenance: Provenance::Manufactured,
            residual,
        })
    }
}

/// Trig mode with harmonic time modulation:
/// `amp cos(nu t + tphase) prod_a sin(omega_a x_a + phase_a)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigTermXt {
    pub spatial: TrigTerm,
    pub nu: f64,
    pub tphase: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CorpusFunctionXt {
    pub terms: Vec<TrigTermXt>,
}

impl CorpusFunctionXt {
    pub fn eval(&self, n: usize, x: &[f64], t: f64) -> f64 {
        self.terms
            .iter()
            .map(|tm| (tm.nu * t + tm.tphase).cos() * tm.spatial.eval(n, x))
            .sum()
    }

    /// `f = u_t - lap u`.
    pub fn rhs(&self, n: usize, x: &[f64], t: f64) -> f64 {
        self.terms
            .iter()
            .map(|tm| {
                let s = tm.spatial.eval(n, x);
                let k2: f64 = (0..n).map(|a| tm.spatial.omega[a] * tm.spatial.omega[a]).sum();
                -tm.nu * (tm.nu * t + tm.tphase).sin() * s + k2 * (tm.nu * t + tm.tphase).cos() * s
            })
            .sum()
    }

    pub fn sample_pair(&self, grid: &SpaceTimeDomain) -> Result<SolutionPair<SpaceTimeDomain>> {
        let n = grid.space().n();
        let u = ScalarField::from_fn_xt(grid.clone(), |x, t| self.eval(n, x, t))?;
        let f = ScalarField::from_fn_xt(grid.clone(), |x, t| self.rhs(n, x, t))?;
        let residual = interior_max_abs(&dt(&u)?.sub(&laplacian(&u)?)?.sub(&f)?, 1);
        Ok(SolutionPair {
            u,
            f,
            provenance: Provenance::Manufactured,
            residual,
        })
    }
}

fn draw_trig_terms(rng: &mut ChaCha8Rng, n: usize, spec: &CorpusSpec) -> Vec<TrigTerm> {
    let base = std::f64::consts::PI / 2.0;
    let modes = spec.modes.max(1);
    let mut terms = Vec::new();
    let mut k = [1usize; 3];
    loop {
        let k2: f64 = (0..n).map(|a| (k[a] * k[a]) as f64).sum();
        let amp_lead = rng.random_range(spec.amplitude.0..spec.amplitude.1);
        let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
        let mut omega = [0.0; 3];
        let mut phase = [0.0; 3];
        for a in 0..n {
            omega[a] = k[a] as f64 * base;
            phase[a] = rng.random_range(0.0..std::f64::consts::TAU);
        }
        terms.push(TrigTerm {
            amp: sign * amp_lead * k2.powf(-spec.decay / 2.0),
            omega,
            phase,
        });
        // odometer over {1..modes}^n
        let mut a = n;
        let advanced = loop {
            if a == 0 {
                break false;
            }
            a -= 1;
            if k[a] < modes {
                k[a] += 1;
                for b in a + 1..n {
                    k[b] = 1;
                }
                break true;
            }
        };
        if !advanced {
            return terms;
        }
    }
}

/// Draw the continuum corpus functions (elliptic).
pub fn corpus(spec: &CorpusSpec, n: usize) -> Vec<CorpusFunction> {
    (0..spec.count)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(spec.seed, i as u64));
            match spec.family {
                CorpusFamily::TrigPolynomial => {
                    CorpusFunction::Trig(draw_trig_terms(&mut rng, n, spec))
                }
                CorpusFamily::RadialPower => {
                    let amp = rng.random_range(spec.amplitude.0..spec.amplitude.1);
                    let c2 = rng.random_range(0.1..1.0);
                    let q = rng.random_range(0.75..1.75);
                    let mut center = [0.0; 3];
                    for c in center.iter_mut().take(n) {
                        *c = rng.random_range(-0.5..0.5);
                    }
                    CorpusFunction::RadialPower { amp, c2, q, center }
                }
                CorpusFamily::Bump => {
                    let amplitude = rng.random_range(spec.amplitude.0..spec.amplitude.1);
                    let power = rng.random_range(4..7u32);
                    let radius = rng.random_range(0.8..1.5);
                    let mut center = [0.0; 3];
                    for c in center.iter_mut().take(n) {
                        *c = rng.random_range(-0.3..0.3);
                    }
                    CorpusFunction::Bump(Recipe::Bump {
                        power,
                        radius,
                        center,
                        amplitude,
                    })
                }
            }
        })
        .collect()
}

/// Draw the continuum corpus functions (parabolic, trig family).
pub fn corpus_xt(spec: &CorpusSpec, n: usize) -> Vec<CorpusFunctionXt> {
    (0..spec.count)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(spec.seed ^ 0x9e3779b9, i as u64));
            let terms = draw_trig_terms(&mut rng, n, spec)
                .into_iter()
                .map(|spatial| TrigTermXt {
                    spatial,
                    nu: rng.random_range(0.5..3.0),
                    tphase: rng.random_range(0.0..std::f64::consts::TAU),
                })
                .collect();
            CorpusFunctionXt { terms }
        })
        .collect()
}

/// Sample the whole corpus on a grid; independent items solve in parallel
/// with ordered collection.
pub fn corpus_pairs(spec: &CorpusSpec, domain: &Domain) -> Result<Vec<SolutionPair<Domain>>> {
    corpus(spec, domain.n())
        .par_iter()
        .map(|func| func.sample_pair(domain))
        .collect()
}

pub fn corpus_pairs_xt(
    spec: &CorpusSpec,
    grid: &SpaceTimeDomain,
) -> Result<Vec<SolutionPair<SpaceTimeDomain>>> {
    corpus_xt(spec, grid.space().n())
        .par_iter()
        .map(|func| func.sample_pair(grid))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(seed: u64, count: usize) -> CorpusSpec {
        CorpusSpec {
            seed,
            count,
            family: CorpusFamily::TrigPolynomial,
            decay: 3.0,
            amplitude: (0.5, 1.5),
            modes: 3,
        }
    }

    #[test]
    fn empty_corpus_is_empty() {
        assert!(corpus(&spec(1, 0), 2).is_empty());
    }

    #[test]
    fn same_seed_is_bitwise_identical() {
        let d = Domain::unit_lab(2, 32).unwrap();
        let a = corpus_pairs(&spec(42, 4), &d).unwrap();
        let b = corpus_pairs(&spec(42, 4), &d).unwrap();
        for (pa, pb) in a.iter().zip(&b) {
            assert_eq!(pa.u.values(), pb.u.values());
            assert_eq!(pa.f.values(), pb.f.values());
        }
        let c = corpus_pairs(&spec(43, 4), &d).unwrap();
        assert_ne!(a[0].u.values(), c[0].u.values());
    }

    #[test]
    fn residuals_scale_like_h_squared_across_seeds() {
        let coarse = Domain::unit_lab(2, 64).unwrap();
        let fine = Domain::unit_lab(2, 127).unwrap();
        for seed in [7, 8, 9] {
            let s = spec(seed, 2);
            let rc = corpus_pairs(&s, &coarse).unwrap();
            let rf = corpus_pairs(&s, &fine).unwrap();
            for (pc, pf) in rc.iter().zip(&rf) {
                let c_coarse = pc.residual / (coarse.h() * coarse.h());
                let c_fine = pf.residual / (fine.h() * fine.h());
                assert!(
                    c_fine < 3.0 * c_coarse && c_coarse < 3.0 * c_fine,
                    "seed {seed}: residual constants {c_coarse} vs {c_fine}"
                );
            }
        }
    }

    #[test]
    fn all_families_sample_with_small_residuals() {
        let d = Domain::unit_lab(2, 96).unwrap();
        for family in [CorpusFamily::RadialPower, CorpusFamily::Bump] {
            let s = CorpusSpec { family, ..spec(3, 3) };
            let pairs = corpus_pairs(&s, &d).unwrap();
            assert_eq!(pairs.len(), 3);
            for p in &pairs {
                assert!(
                    p.residual < 0.5,
                    "{family:?}: manufactured residual {}",
                    p.residual
                );
            }
            let again = corpus_pairs(&s, &d).unwrap();
            assert_eq!(pairs[0].u.values(), again[0].u.values());
        }
    }

    #[test]
    fn parabolic_corpus_has_small_residuals() {
        let grid = SpaceTimeDomain::unit_lab(2, 48, 48).unwrap();
        let pairs = corpus_pairs_xt(&spec(5, 2), &grid).unwrap();
        for p in &pairs {
            assert!(p.residual < 1.0, "manufactured residual {}", p.residual);
        }
    }
}
