//! Deterministic quadrature and differentiation kernels.

mod diff;
mod fit;
mod gauss_tables;
mod quadrature;
mod sum;

pub use fit::fit_quadratic;
pub use diff::{central_diff, central_diff_n, try_central_diff, DiffSpec};
pub use quadrature::{
    gauss_legendre_1d, gauss_legendre_1d_breaks, integrate_2d, integrate_2d_breaks,
    try_gauss_legendre_1d, try_gauss_legendre_1d_breaks, try_integrate_2d,
    try_integrate_2d_breaks, QuadratureSpec, Rect, MAX_ADAPTIVE_CELLS,
};
pub use sum::CompensatedSum;
