//! Solution-pair factories: manufactured analytic pairs, a discrete Poisson
//! solver, a theta-scheme heat solver, and a seeded corpus generator.

pub mod cg;
pub mod corpus;
pub mod heat;
pub mod poisson;
pub mod recipe;

use serde::Serialize;

use crate::error::Result;
use crate::fields::deriv::{dt, interior_max_abs, laplacian};
use crate::fields::domain::{Domain, Grid, SpaceTimeDomain};
use crate::fields::scalar::ScalarField;

pub use corpus::{corpus, corpus_pairs, corpus_pairs_xt, corpus_xt, CorpusFamily, CorpusSpec};
pub use heat::{solve_heat, DEFAULT_THETA};
pub use poisson::solve_poisson;
pub use recipe::{capped_radial_power, HeatRecipe, Recipe};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Manufactured,
    Solved,
}

/// A pair `(u, f)` tied by the elliptic or parabolic equation, with the
/// measured discrete residual on the producing stencil. Solved pairs keep the
/// residual at the linear-solver tolerance; manufactured pairs record the
/// actually measured `O(h^2)` consistency defect.
#[derive(Clone, Debug)]
pub struct SolutionPair<G: Grid> {
    pub u: ScalarField<G>,
    pub f: ScalarField<G>,
    pub provenance: Provenance,
    pub residual: f64,
}

/// Sample `u` analytically and set `f := lap u` from the closed form; the
/// residual against the discrete stencil is measured, never assumed.
pub fn manufactured_pair(domain: &Domain, recipe: &Recipe) -> Result<SolutionPair<Domain>> {
    let u = recipe.sample_u(domain)?;
    let f = recipe.sample_f(domain)?;
    let residual = interior_max_abs(&laplacian(&u)?.sub(&f)?, 1);
    Ok(SolutionPair {
        u,
        f,
        provenance: Provenance::Manufactured,
        residual,
    })
}

/// Parabolic counterpart: `f := u_t - lap u` from the closed form.
pub fn manufactured_heat_pair(
    grid: &SpaceTimeDomain,
    recipe: &HeatRecipe,
) -> Result<SolutionPair<SpaceTimeDomain>> {
    let u = recipe.sample_u(grid)?;
    let f = recipe.sample_f(grid)?;
    let residual = interior_max_abs(&dt(&u)?.sub(&laplacian(&u)?)?.sub(&f)?, 1);
    Ok(SolutionPair {
        u,
        f,
        provenance: Provenance::Manufactured,
        residual,
    })
}

/// Serialize a pair as two field files plus a text key-value sidecar
/// carrying provenance and the measured residual:
/// `<stem>_u.czf`, `<stem>_f.czf`, `<stem>.pair`.
pub fn save_pair(
    pair: &SolutionPair<Domain>,
    dir: impl AsRef<std::path::Path>,
    stem: &str,
) -> Result<()> {
    use crate::fields::io;
    let dir = dir.as_ref();
    io::write_scalar(&pair.u, dir.join(format!("{stem}_u.czf")))?;
    io::write_scalar(&pair.f, dir.join(format!("{stem}_f.czf")))?;
    let provenance = match pair.provenance {
        Provenance::Manufactured => "manufactured",
        Provenance::Solved => "solved",
    };
    let sidecar = format!(
        "provenance = {provenance}\nresidual = {}\nu = {stem}_u.czf\nf = {stem}_f.czf\n",
        pair.residual
    );
    std::fs::write(dir.join(format!("{stem}.pair")), sidecar)?;
    Ok(())
}

/// Load a pair saved by `save_pair`.
pub fn load_pair(
    dir: impl AsRef<std::path::Path>,
    stem: &str,
) -> Result<SolutionPair<Domain>> {
    use crate::error::CzError;
    use crate::fields::io;
    let dir = dir.as_ref();
    let text = std::fs::read_to_string(dir.join(format!("{stem}.pair")))?;
    let mut provenance = None;
    let mut residual = None;
    for line in text.lines() {
        if let Some((key, value)) = line.split_once('=') {
            match key.trim() {
                "provenance" => {
                    provenance = Some(match value.trim() {
                        "manufactured" => Provenance::Manufactured,
                        "solved" => Provenance::Solved,
                        other => {
                            return Err(CzError::BadFieldFile(format!(
                                "unknown provenance '{other}'"
                            )))
                        }
                    })
                }
                "residual" => {
                    residual = value.trim().parse::<f64>().ok();
                }
                _ => {}
            }
        }
    }
    let u = io::read_scalar(dir.join(format!("{stem}_u.czf")))?;
    let f = io::read_scalar(dir.join(format!("{stem}_f.czf")))?;
    if u.grid() != f.grid() {
        return Err(CzError::BadFieldFile("pair grids disagree".into()));
    }
    Ok(SolutionPair {
        u,
        f,
        provenance: provenance
            .ok_or_else(|| CzError::BadFieldFile("sidecar missing provenance".into()))?,
        residual: residual
            .ok_or_else(|| CzError::BadFieldFile("sidecar missing residual".into()))?,
    })
}
