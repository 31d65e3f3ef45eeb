//! Grids, fields, derivatives, regions, norms, mollification and field I/O.

pub mod deriv;
pub mod domain;
pub mod io;
pub mod mollify;
pub mod region;
pub mod scalar;
pub mod tensor;

pub use deriv::{dt, gradient, hessian, interior_max_abs, laplacian};
pub use domain::{Domain, Grid, SpaceTimeDomain};
pub use mollify::{mollify, Mollified};
pub use region::{
    lp_integral, lp_integral_tensor, lp_norm, lp_norm_tensor, mean_square, mean_square_tensor,
    region_average, region_average_tensor, region_measure, region_nodes, Region,
};
pub use scalar::{ScalarField, SpaceTimeField, SpatialField};
pub use tensor::{sym_components, SymTensorField};
