//! Analytic side: Bessel functions, Poincaré-series approximations and
//! growth-rate fits on extracted exponents.

pub mod bessel;
pub mod growth;
pub mod poincare;

pub use bessel::{bessel_i1, bessel_i_half, bessel_k_half};
pub use growth::{
    check_bound, growth_fit, json_number, ln_abs_bigint, ln_abs_rational, ols, BoundKind,
    BoundReport, GrowthFit, LineFit, Verdict, LEVEL_ONE_PROXY_NOTE,
};
pub use poincare::{b_coeff_truncated, b_envelope_ln, j_approx, BCoefficient, LogComplex};
