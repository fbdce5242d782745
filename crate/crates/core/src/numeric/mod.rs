//! Dense linear algebra and distribution tails shared by every other module.

mod chol;
mod dist;
mod eigen;
mod lstsq;
mod matrix;
mod svd;

pub use chol::{cholesky, Spd};
pub use dist::{chi2_sf, f_sf};
pub use eigen::{sym_eigen, EigenDecomposition};
pub use lstsq::{gradient_ratio, residuals, solve_least_squares, Qr, RANK_TOLERANCE};
pub use matrix::{dot, norm2, norm_inf, Matrix};
pub use svd::{condition_number, scaled_condition_number, singular_values, CnScaling};
