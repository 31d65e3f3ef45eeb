//! Error type shared by every module of the lab.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CzError {
    #[error("domain too small: m = {m}, need m >= {min}")]
    DomainTooSmall { m: usize, min: usize },

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("field values must be finite")]
    NonFiniteValues,

    #[error("field/grid mismatch: {0}")]
    GridMismatch(String),

    #[error("region contains no grid nodes")]
    EmptyRegion,

    #[error("Lp order must satisfy p >= 1, got {p}")]
    InvalidOrder { p: f64 },

    #[error("mollifier scale eps = {eps:.3e} unresolved on grid with h = {h:.3e} (need eps >= 2h)")]
    KernelUnresolved { eps: f64, h: f64 },

    #[error("invalid radius set: {0}")]
    InvalidRadiusSet(String),

    #[error("evaluation point (flat index {node}) has no admissible radius")]
    NoAdmissibleRadius { node: usize },

    #[error("{context}: solver did not converge (residual {residual:.3e} after {iters} iterations)")]
    NonConvergence {
        context: String,
        residual: f64,
        iters: usize,
    },

    #[error("field is not compactly supported: boundary magnitude {magnitude:.3e}")]
    NotCompactlySupported { magnitude: f64 },

    #[error("variance identity violated: two-pass {direct:.6e} vs convolution form {identity:.6e}")]
    VarianceIdentity { direct: f64, identity: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("bad field file: {0}")]
    BadFieldFile(String),
}

pub type Result<T> = std::result::Result<T, CzError>;
