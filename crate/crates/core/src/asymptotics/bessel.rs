//! Modified Bessel functions needed for the Poincaré-series asymptotics.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Argument where [`bessel_i1`] switches from the power series to the
/// large-argument expansion.
pub const I1_SERIES_LIMIT: f64 = 20.0;

fn require_positive(x: f64, name: &str) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} needs x > 0, got {x}")))
    }
}

/// `I_{1/2}(x) = √(2/(πx))·sinh x`.
pub fn bessel_i_half(x: f64) -> Result<f64> {
    require_positive(x, "bessel_i_half")?;
    Ok((2.0 / (PI * x)).sqrt() * x.sinh())
}

/// `K_{1/2}(x) = √(π/(2x))·e^{-x}`.
pub fn bessel_k_half(x: f64) -> Result<f64> {
    require_positive(x, "bessel_k_half")?;
    Ok((PI / (2.0 * x)).sqrt() * (-x).exp())
}

/// `(x/2) Σ_k (x²/4)^k / (k!(k+1)!)`, summed until terms stop mattering.
pub fn bessel_i1_series(x: f64) -> f64 {
    let q = x * x / 4.0;
    let mut term = x / 2.0;
    let mut sum = term;
    for k in 1..500 {
        term *= q / (k as f64 * (k + 1) as f64);
        sum += term;
        if term < sum * 1e-17 {
            break;
        }
    }
    sum
}

/// Hankel expansion `e^x/√(2πx) Σ_k (-1)^k a_k(1)/x^k`, truncated at its
/// smallest term.
pub fn bessel_i1_asymptotic(x: f64) -> f64 {
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    for k in 1..30 {
        let odd = (2 * k - 1) as f64;
        // a_k / a_{k-1} = (4ν² - (2k-1)²) / (8k), ν = 1, with the (-1)^k sign
        let next = -term * (4.0 - odd * odd) / (8.0 * k as f64 * x);
        if next.abs() >= term.abs() {
            break;
        }
        term = next;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    x.exp() / (2.0 * PI * x).sqrt() * sum
}

/// `I_1(x)`: power series up to [`I1_SERIES_LIMIT`], large-argument expansion beyond.
pub fn bessel_i1(x: f64) -> Result<f64> {
    require_positive(x, "bessel_i1")?;
    Ok(if x <= I1_SERIES_LIMIT {
        bessel_i1_series(x)
    } else {
        bessel_i1_asymptotic(x)
    })
}
