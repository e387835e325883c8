//! Closed-form constant-term approximation of `j_{N,m}` and truncated
//! Kloosterman–Bessel sums for `b_m(1, 0)`.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::bessel::bessel_i1;
use crate::arith::KloostermanTable;
use crate::error::{Error, Result};

/// A complex number held as `(ln|z|, arg z)` so huge magnitudes survive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogComplex {
    pub log_magnitude: f64,
    pub phase: f64,
}

impl LogComplex {
    /// `None` when `|z|` overflows a double.
    pub fn to_complex(self) -> Option<Complex64> {
        if self.log_magnitude == f64::NEG_INFINITY {
            return Some(Complex64::new(0.0, 0.0));
        }
        let mag = self.log_magnitude.exp();
        mag.is_finite().then(|| Complex64::from_polar(mag, self.phase))
    }
}

/// `j_m(z) ≈ (1/(π√m))·(e^{2πimx} sinh(2πmy) + a_m(1) e^{-2πmy})`.
///
/// The level only enters through `a_m(1)`, which the caller supplies.
/// With `s = 2πmy` this is evaluated as `e^s/(π√m) · W`,
/// `W = e^{2πimx}(1 - e^{-2s})/2 + a e^{-2s}`, which is finite for every `s`.
pub fn j_approx(_level: u64, m: u64, x: f64, y: f64, a_m1: f64) -> Result<LogComplex> {
    if m == 0 {
        return Err(Error::Domain("j_approx needs m >= 1".into()));
    }
    if y.is_nan() || y < 0.0 {
        return Err(Error::Domain(format!("j_approx needs y >= 0, got {y}")));
    }
    let mf = m as f64;
    let s = 2.0 * PI * mf * y;
    let damp = (-2.0 * s).exp();
    let rot = Complex64::from_polar(1.0, 2.0 * PI * mf * x);
    let w = rot * (-(-2.0 * s).exp_m1() / 2.0) + a_m1 * damp;
    let norm = w.norm();
    let log_magnitude = if norm == 0.0 {
        f64::NEG_INFINITY
    } else {
        s - (PI * mf.sqrt()).ln() + norm.ln()
    };
    Ok(LogComplex {
        log_magnitude,
        phase: w.arg(),
    })
}

/// Result of a truncated `b_m(1, 0)` sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BCoefficient {
    pub value: f64,
    /// Number of moduli `c` summed.
    pub terms: usize,
    /// Set when `c_max < N` and the sum was empty.
    pub empty: bool,
}

/// `2π√m · Σ_{c = N, 2N, ... ≤ c_max} K(-m, 1; c)/c · I_1(4π√m/c)`.
pub fn b_coeff_truncated(level: u64, m: u64, c_max: u64) -> Result<BCoefficient> {
    if level == 0 || m == 0 {
        return Err(Error::Domain("b_coeff needs positive level and index".into()));
    }
    let sqrt_m = (m as f64).sqrt();
    let mut sum = 0.0;
    let mut terms = 0;
    let mut c = level;
    while c <= c_max {
        let k = KloostermanTable::new(c)?.sum(-(m as i64), 1);
        sum += k.value.re / c as f64 * bessel_i1(4.0 * PI * sqrt_m / c as f64)?;
        terms += 1;
        c += level;
    }
    Ok(BCoefficient {
        value: 2.0 * PI * sqrt_m * sum,
        terms,
        empty: terms == 0,
    })
}

/// The envelope `m^{1/4} e^{4π√m}`, as its logarithm.
pub fn b_envelope_ln(m: u64) -> f64 {
    let mf = m as f64;
    0.25 * mf.ln() + 4.0 * PI * mf.sqrt()
}
