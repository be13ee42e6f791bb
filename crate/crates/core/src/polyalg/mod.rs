//! Exact polynomial algebra: Gaussian-rational scalars, multivariate
//! polynomials in `v`, `w = v̄` and central `t` variables, normal-ordered
//! differential operators and infinitesimal Lie actions.

mod action;
mod poly;
mod scalar;
mod weyl;

pub use action::{infinitesimal_action, LieElement};
pub use poly::{Exponent, MultiPoly, VarSet, VarStyle};
pub use scalar::{fmt_ratio, parse_ratio, ratio_to_f64, Scalar};
pub use weyl::WeylOp;
