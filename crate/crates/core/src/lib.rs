//! Numerical laboratory for interior W^{2,p} regularity of the Laplacian and
//! the heat operator.
//!
//! The crate builds solution pairs of `lap u = f` and `u_t - lap u = f` on
//! uniform grids, evaluates Hardy-Littlewood and 2-sharp maximal operators
//! over discrete radius ladders, and measures both sides of the classical
//! estimates (Calderon-Zygmund, Fefferman-Stein sandwich, pointwise sharp
//! maximal bounds, blow-up normalizations) so their constants can be tracked
//! under grid refinement.

// dimension-generic code indexes the first n slots of fixed [_; 3] arrays;
// plain `for a in 0..n` loops read clearest there
#![allow(clippy::needless_range_loop)]

pub mod error;
pub mod fields;
pub mod maximal;
pub mod solvers;
pub mod verify;

pub use error::{CzError, Result};
