//! Run configuration: TOML with one `[[experiment]]` section per experiment.

use serde::Deserialize;

use czlab_core::maximal::{Backend, LadderKind};
use czlab_core::solvers::{CorpusFamily, CorpusSpec};

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_dimension")]
    pub dimension: usize,
    #[serde(default)]
    pub out_dir: Option<String>,
    /// Spatial refinement ladder (grid points per axis), strictly increasing.
    #[serde(default = "default_grids")]
    pub grids: Vec<usize>,
    /// Parabolic ladder as `[m, nt]` pairs.
    #[serde(default = "default_parabolic_grids")]
    pub parabolic_grids: Vec<[usize; 2]>,
    #[serde(default = "default_backend")]
    pub maximal_backend: String,
    #[serde(default = "default_ladder")]
    pub radius_ladder: String,
    #[serde(default)]
    pub dump_fields: bool,
    #[serde(default)]
    pub corpus: CorpusConfig,
    #[serde(default)]
    pub experiment: Vec<ExperimentConfig>,
}

fn default_seed() -> u64 {
    42
}

fn default_dimension() -> usize {
    2
}

fn default_grids() -> Vec<usize> {
    vec![64, 128]
}

fn default_parabolic_grids() -> Vec<[usize; 2]> {
    vec![[64, 64], [128, 128]]
}

fn default_backend() -> String {
    "mask".into()
}

fn default_ladder() -> String {
    "geometric".into()
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusConfig {
    #[serde(default = "default_count")]
    pub count: usize,
    #[serde(default = "default_parabolic_count")]
    pub parabolic_count: usize,
    #[serde(default = "default_family")]
    pub family: String,
    #[serde(default = "default_decay")]
    pub decay: f64,
    #[serde(default = "default_amplitude")]
    pub amplitude: [f64; 2],
    #[serde(default = "default_modes")]
    pub modes: usize,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        Self {
            count: default_count(),
            parabolic_count: default_parabolic_count(),
            family: default_family(),
            decay: default_decay(),
            amplitude: default_amplitude(),
            modes: default_modes(),
        }
    }
}

fn default_count() -> usize {
    20
}

fn default_parabolic_count() -> usize {
    10
}

fn default_family() -> String {
    "trig-polynomial".into()
}

fn default_decay() -> f64 {
    3.0
}

fn default_amplitude() -> [f64; 2] {
    [0.5, 1.5]
}

fn default_modes() -> usize {
    3
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    /// Per-experiment spatial ladder override.
    #[serde(default)]
    pub grids: Option<Vec<usize>>,
    /// Per-experiment parabolic ladder override.
    #[serde(default)]
    pub parabolic_grids: Option<Vec<[usize; 2]>>,
    /// Lebesgue exponents (experiments with a p parameter).
    #[serde(default)]
    pub p: Option<Vec<f64>>,
    /// Recipe string for single-input experiments.
    #[serde(default)]
    pub recipe: Option<String>,
    /// Sample-point count for the pointwise estimates.
    #[serde(default)]
    pub points: Option<usize>,
    /// Blow-up selection factor.
    #[serde(default)]
    pub delta: Option<f64>,
}

impl ExperimentConfig {
    pub fn named(name: &str) -> Self {
        Self {
            name: name.to_string(),
            ..Default::default()
        }
    }
}

#[derive(Debug)]
pub enum ConfigError {
    Invalid(String),
    UnknownExperiment(String),
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConfigError::Invalid(msg) => write!(f, "invalid config: {msg}"),
            ConfigError::UnknownExperiment(name) => write!(f, "unknown experiment '{name}'"),
        }
    }
}

impl std::error::Error for ConfigError {}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let cfg: RunConfig =
            toml::from_str(text).map_err(|e| ConfigError::Invalid(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(1..=3).contains(&self.dimension) {
            return Err(ConfigError::Invalid(format!(
                "dimension must be 1, 2 or 3, got {}",
                self.dimension
            )));
        }
        for w in self.grids.windows(2) {
            if w[1] <= w[0] {
                return Err(ConfigError::Invalid(
                    "grid ladder must be strictly increasing".into(),
                ));
            }
        }
        for w in self.parabolic_grids.windows(2) {
            if w[1][0] <= w[0][0] {
                return Err(ConfigError::Invalid(
                    "parabolic grid ladder must be strictly increasing".into(),
                ));
            }
        }
        self.backend()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        self.ladder_kind()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        self.corpus_family()
            .map_err(ConfigError::Invalid)?;
        for exp in &self.experiment {
            if crate::catalog::entry(&exp.name).is_none() {
                return Err(ConfigError::UnknownExperiment(exp.name.clone()));
            }
            if let Some(ps) = &exp.p {
                for &p in ps {
                    let finite_ok = p.is_finite() && p > 1.0;
                    let inf_ok = p.is_infinite() && exp.name == "sharpness_demo_pinf";
                    if !finite_ok && !inf_ok {
                        return Err(ConfigError::Invalid(format!(
                            "p = {p} out of range for {}",
                            exp.name
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn backend(&self) -> Result<Backend, String> {
        self.maximal_backend.parse()
    }

    pub fn ladder_kind(&self) -> Result<LadderKind, String> {
        self.radius_ladder.parse()
    }

    pub fn corpus_family(&self) -> Result<CorpusFamily, String> {
        match self.corpus.family.as_str() {
            "trig-polynomial" => Ok(CorpusFamily::TrigPolynomial),
            "radial-power" => Ok(CorpusFamily::RadialPower),
            "bump" => Ok(CorpusFamily::Bump),
            other => Err(format!("unknown corpus family '{other}'")),
        }
    }

    pub fn corpus_spec(&self) -> CorpusSpec {
        CorpusSpec {
            seed: self.seed,
            count: self.corpus.count,
            family: self.corpus_family().expect("validated"),
            decay: self.corpus.decay,
            amplitude: (self.corpus.amplitude[0], self.corpus.amplitude[1]),
            modes: self.corpus.modes,
        }
    }

    pub fn parabolic_corpus_spec(&self) -> CorpusSpec {
        CorpusSpec {
            count: self.corpus.parabolic_count,
            ..self.corpus_spec()
        }
    }
}
