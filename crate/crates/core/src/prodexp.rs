//! Infinite-product exponents: `f = q^h Π_{m≥1} (1 - q^m)^{c(m)}`.
//!
//! [`extract`] reads the exponents off the logarithmic derivative: with
//! `θf/f = h + Σ A(n) qⁿ` one has `A(n) = -Σ_{d|n} d·c(d)`, so Möbius
//! inversion gives `c(m) = -(1/m) Σ_{d|m} μ(m/d) A(d)`. [`extract_oracle`]
//! peels the factors off one at a time instead and shares no code with it.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith::{divisors, is_prime, mobius};
use crate::error::{Error, Result};
use crate::qseries::{Lead, QSeries};

/// Largest order the peeling oracle accepts.
pub const ORACLE_MAX_ORDER: usize = 64;

/// Exponents `c(1..=M)` of a normalized q-series.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentSeries {
    values: Vec<BigRational>,
    h: i64,
    source: String,
    level: Option<u64>,
}

impl ExponentSeries {
    pub fn new(values: Vec<BigRational>, h: i64, source: String) -> Self {
        ExponentSeries {
            values,
            h,
            source,
            level: None,
        }
    }

    pub fn with_level(mut self, level: u64) -> Self {
        self.level = Some(level);
        self
    }

    pub fn from_integers(values: &[i64], h: i64) -> Self {
        Self::new(
            values.iter().map(|&v| BigRational::from_integer(v.into())).collect(),
            h,
            String::new(),
        )
    }

    /// `c(1), c(2), ...`; index `m - 1` holds `c(m)`.
    pub fn values(&self) -> &[BigRational] {
        &self.values
    }

    /// `c(m)` for `1 <= m <= M`.
    pub fn get(&self, m: usize) -> Option<&BigRational> {
        m.checked_sub(1).and_then(|i| self.values.get(i))
    }

    /// The order `M` the exponents are valid to.
    pub fn order(&self) -> usize {
        self.values.len()
    }

    pub fn h(&self) -> i64 {
        self.h
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn level(&self) -> Option<u64> {
        self.level
    }

    pub fn is_integral(&self) -> bool {
        self.values.iter().all(|c| c.is_integer())
    }

    pub fn integer_values(&self) -> Option<Vec<BigInt>> {
        self.values
            .iter()
            .map(|c| c.is_integer().then(|| c.to_integer()))
            .collect()
    }

    /// Termwise sum over the common order; exponents of a product.
    pub fn add(&self, other: &ExponentSeries) -> ExponentSeries {
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + b)
            .collect();
        ExponentSeries::new(values, self.h + other.h, String::new())
    }

    pub fn truncate(&self, m: usize) -> Result<ExponentSeries> {
        if m > self.order() {
            return Err(Error::InsufficientPrecision {
                requested: m as i64,
                available: self.order() as i64,
            });
        }
        let mut out = self.clone();
        out.values.truncate(m);
        Ok(out)
    }
}

fn check_normalized(f: &QSeries, h: i64) -> Result<()> {
    if f.integer_lead() != Some(h) {
        return Err(Error::Normalization(format!(
            "series lead {} does not match h = {h}",
            f.lead()
        )));
    }
    if !f.leading_coefficient().is_one() {
        return Err(Error::Normalization(format!(
            "a(h) = {} is not 1",
            f.leading_coefficient()
        )));
    }
    if f.trunc() < 2 {
        return Err(Error::InsufficientPrecision {
            requested: 2,
            available: f.trunc() as i64,
        });
    }
    Ok(())
}

/// Exponents of `f` to order `trunc(f) - 1` by the log-derivative route.
pub fn extract(f: &QSeries, h: i64) -> Result<ExponentSeries> {
    check_normalized(f, h)?;
    let order = f.trunc() - 1;
    let log_deriv = f.theta()?.mul(&f.reciprocal()?);
    let constant = log_deriv.coeff(0)?;
    if constant != BigRational::from_integer(h.into()) {
        return Err(Error::Consistency(format!(
            "constant term of theta(f)/f is {constant}, expected {h}"
        )));
    }
    let a: Vec<BigRational> = (1..=order as i64)
        .map(|n| log_deriv.coeff(n))
        .collect::<Result<_>>()?;
    let mut values = Vec::with_capacity(order);
    for m in 1..=order as u64 {
        let mut acc = BigRational::zero();
        for d in divisors(m)? {
            match mobius(m / d)? {
                1 => acc += &a[d as usize - 1],
                -1 => acc -= &a[d as usize - 1],
                _ => {}
            }
        }
        values.push(-acc / BigRational::from_integer(m.into()));
    }
    Ok(ExponentSeries::new(values, h, String::new()))
}

/// Multiplies the coefficient vector `g` (lead 0) by `(1 - q^m)^e` in place.
fn apply_factor(g: &mut [BigRational], m: usize, e: &BigRational) {
    if e.is_zero() {
        return;
    }
    let len = g.len();
    // binomial coefficients of (1 - x)^e, x = q^m: b_j = (-1)^j C(e, j)
    let mut b = vec![BigRational::one()];
    for j in 1..=(len - 1) / m {
        let jr = BigRational::from_integer(BigInt::from(j));
        let next = -&b[j - 1] * (e - (&jr - BigRational::one())) / jr;
        if next.is_zero() {
            break;
        }
        b.push(next);
    }
    for n in (m..len).rev() {
        let mut acc = BigRational::zero();
        for (j, bj) in b.iter().enumerate().skip(1) {
            if j * m > n {
                break;
            }
            acc += bj * &g[n - j * m];
        }
        g[n] += acc;
    }
}

/// Exponents by peeling `(1 - q^m)^{c(m)}` off one factor at a time.
/// Test oracle; `m` is limited to [`ORACLE_MAX_ORDER`].
pub fn extract_oracle(f: &QSeries, h: i64, m: usize) -> Result<ExponentSeries> {
    check_normalized(f, h)?;
    if m > ORACLE_MAX_ORDER {
        return Err(Error::Domain(format!(
            "oracle order {m} exceeds {ORACLE_MAX_ORDER}"
        )));
    }
    if m + 1 > f.trunc() {
        return Err(Error::InsufficientPrecision {
            requested: m as i64 + 1,
            available: f.trunc() as i64,
        });
    }
    let mut g: Vec<BigRational> = f.coeffs()[..=m].to_vec();
    let mut values = Vec::with_capacity(m);
    for k in 1..=m {
        let c = -g[k].clone();
        apply_factor(&mut g, k, &-c.clone());
        debug_assert!(g[k].is_zero());
        values.push(c);
    }
    Ok(ExponentSeries::new(values, h, String::new()))
}

/// `q^h Π_{m≤M} (1 - q^m)^{c(m)}` to relative order `M`.
pub fn reconstruct(e: &ExponentSeries) -> Result<QSeries> {
    let order = e.order().max(1);
    let mut g = vec![BigRational::zero(); order + 1];
    g[0] = BigRational::one();
    for (i, c) in e.values().iter().enumerate() {
        apply_factor(&mut g, i + 1, c);
    }
    QSeries::new(Lead::from_integer(e.h()), g)
}

/// Primes `p <= bound` with `a(p) = 0` in a normalized weight-2 expansion.
pub fn zero_coefficient_primes(a: &QSeries, bound: u64) -> Result<Vec<u64>> {
    check_newform(a)?;
    let mut out = Vec::new();
    for p in (2..=bound).filter(|&p| is_prime(p)) {
        if a.coeff(p as i64)?.is_zero() {
            out.push(p);
        }
    }
    Ok(out)
}

fn check_newform(a: &QSeries) -> Result<()> {
    if a.integer_lead() != Some(1) || !a.leading_coefficient().is_one() {
        return Err(Error::Normalization(format!(
            "expected a(1) = 1, series starts {} q^{}",
            a.leading_coefficient(),
            a.lead()
        )));
    }
    Ok(())
}

/// Odd `m <= bound` divisible by some prime `p` with `a(p) = 0`.
pub fn vanishing_indices(a: &QSeries, bound: u64) -> Result<Vec<u64>> {
    check_newform(a)?;
    let largest_prime = (2..=bound).rev().find(|&p| is_prime(p));
    if let Some(p) = largest_prime {
        if a.precision() < Lead::from_integer(p as i64) {
            return Err(Error::InsufficientPrecision {
                requested: p as i64,
                available: a.precision().to_integer(),
            });
        }
    }
    let primes = zero_coefficient_primes(a, bound)?;
    Ok((1..=bound)
        .step_by(2)
        .filter(|m| primes.iter().any(|p| m % p == 0))
        .collect())
}

/// Largest |c(m)| in the series, as a rational.
pub fn max_abs(e: &ExponentSeries) -> Option<BigRational> {
    e.values().iter().map(|c| c.abs()).max()
}
