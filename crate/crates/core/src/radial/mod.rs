//! Logarithmic radial grids and the radial profiles that live on them.

mod function;
mod grid;
mod maximal;

pub use function::{Dilation, NormValue, RadialFunction};
pub use grid::{RadialGrid, Stencil};
pub(crate) use grid::{lagrange_kernel as grid_lagrange_kernel, lagrange_weights as grid_lagrange_weights};
pub use maximal::{ball_average, hl_maximal};
