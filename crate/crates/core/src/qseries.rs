//! Truncated formal q-expansions with exact rational coefficients.
//!
//! A [`QSeries`] stores `Σ_{n=0}^{M} coeffs[n] q^{lead+n} + O(q^{lead+M+1})`.
//! Coefficients past the truncation order are unknown, never zero: every
//! operation returns the largest order it can guarantee and asks for more
//! precision only through an error.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exponent of the leading term. Denominators are restricted to divisors of 24.
pub type Lead = Ratio<i64>;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct QSeries {
    lead: Lead,
    coeffs: Vec<BigRational>,
}

fn check_lead(lead: &Lead) -> Result<()> {
    if 24 % lead.denom() != 0 {
        return Err(Error::FractionalExponent(format!(
            "leading exponent {lead} has denominator not dividing 24"
        )));
    }
    Ok(())
}

fn lead_to_string(l: &Lead) -> String {
    if l.is_integer() {
        l.numer().to_string()
    } else {
        format!("{}/{}", l.numer(), l.denom())
    }
}

/// Rational coefficients as integers over one common denominator.
fn common_denominator(coeffs: &[BigRational]) -> (Vec<BigInt>, BigInt) {
    let den = coeffs
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints = coeffs
        .iter()
        .map(|c| c.numer() * (&den / c.denom()))
        .collect();
    (ints, den)
}

fn convolve(f: &[BigInt], g: &[BigInt], len: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); len];
    for (i, a) in f.iter().enumerate().take(len) {
        if a.is_zero() {
            continue;
        }
        for (j, b) in g.iter().enumerate().take(len - i) {
            if !b.is_zero() {
                out[i + j] += a * b;
            }
        }
    }
    out
}

impl QSeries {
    /// Builds a series, stripping leading zero coefficients into the lead.
    ///
    /// `coeffs` must hold at least two entries (truncation order ≥ 1).
    pub fn new(lead: Lead, coeffs: Vec<BigRational>) -> Result<Self> {
        check_lead(&lead)?;
        if coeffs.len() < 2 {
            return Err(Error::InsufficientPrecision {
                requested: 1,
                available: coeffs.len() as i64 - 1,
            });
        }
        Self::normalized(lead, coeffs)
    }

    pub fn from_integers(lead: i64, coeffs: &[i64]) -> Result<Self> {
        Self::new(
            Lead::from_integer(lead),
            coeffs.iter().map(|&c| BigRational::from_integer(c.into())).collect(),
        )
    }

    pub fn from_bigints(lead: i64, coeffs: Vec<BigInt>) -> Result<Self> {
        Self::new(
            Lead::from_integer(lead),
            coeffs.into_iter().map(BigRational::from_integer).collect(),
        )
    }

    /// The constant series 1 to order `trunc`.
    pub fn one(trunc: usize) -> Self {
        let mut coeffs = vec![BigRational::zero(); trunc + 1];
        coeffs[0] = BigRational::one();
        QSeries { lead: Lead::zero(), coeffs }
    }

    /// The zero series, known to vanish through `q^{lead+trunc}`.
    pub fn zero(lead: Lead, trunc: usize) -> Self {
        QSeries {
            lead,
            coeffs: vec![BigRational::zero(); trunc + 1],
        }
    }

    /// `c·q^lead + O(q^{lead+trunc+1})`.
    pub fn monomial(c: BigRational, lead: Lead, trunc: usize) -> Result<Self> {
        let mut coeffs = vec![BigRational::zero(); trunc + 1];
        coeffs[0] = c;
        Self::new(lead, coeffs)
    }

    // Strip leading zeros; an all-zero vector stays as the zero series.
    // Cancellation may leave only the leading term known (order 0).
    fn normalized(lead: Lead, mut coeffs: Vec<BigRational>) -> Result<Self> {
        let Some(first) = coeffs.iter().position(|c| !c.is_zero()) else {
            return Ok(QSeries { lead, coeffs });
        };
        if first > 0 {
            coeffs.drain(..first);
        }
        Ok(QSeries {
            lead: lead + Lead::from_integer(first as i64),
            coeffs,
        })
    }

    pub fn lead(&self) -> Lead {
        self.lead
    }

    /// The lead as an integer, if it is one.
    pub fn integer_lead(&self) -> Option<i64> {
        self.lead.is_integer().then(|| self.lead.to_integer())
    }

    /// Truncation order `M`: coefficients are known for `q^{lead}..=q^{lead+M}`.
    /// At least 1 on construction; cancellation in derived series can lower it to 0.
    pub fn trunc(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Exponent of the last known coefficient.
    pub fn precision(&self) -> Lead {
        self.lead + Lead::from_integer(self.trunc() as i64)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn leading_coefficient(&self) -> &BigRational {
        &self.coeffs[0]
    }

    /// Coefficient of `q^{exp}`; zero below the lead, an error past the
    /// truncation order or off the exponent lattice `lead + ℤ`.
    pub fn coeff_at(&self, exp: Lead) -> Result<BigRational> {
        let offset = exp - self.lead;
        if !offset.is_integer() {
            return Err(Error::IncompatibleExponent(
                lead_to_string(&exp),
                lead_to_string(&self.lead),
            ));
        }
        let k = offset.to_integer();
        if k < 0 {
            return Ok(BigRational::zero());
        }
        self.coeffs.get(k as usize).cloned().ok_or(Error::InsufficientPrecision {
            requested: exp.to_integer(),
            available: self.precision().to_integer(),
        })
    }

    /// Integer-exponent shorthand for [`coeff_at`](Self::coeff_at).
    pub fn coeff(&self, exp: i64) -> Result<BigRational> {
        self.coeff_at(Lead::from_integer(exp))
    }

    /// True when every known coefficient is an integer.
    pub fn has_integer_coefficients(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    pub fn add(&self, other: &QSeries) -> Result<QSeries> {
        let diff = self.lead - other.lead;
        if !diff.is_integer() {
            return Err(Error::IncompatibleExponent(
                lead_to_string(&self.lead),
                lead_to_string(&other.lead),
            ));
        }
        let lead = self.lead.min(other.lead);
        let prec = self.precision().min(other.precision());
        let span = (prec - lead).to_integer();
        if span < 0 {
            return Err(Error::InsufficientPrecision {
                requested: 1,
                available: span,
            });
        }
        let mut coeffs = vec![BigRational::zero(); span as usize + 1];
        for s in [self, other] {
            let off = (s.lead - lead).to_integer() as usize;
            for (i, c) in s.coeffs.iter().enumerate() {
                if let Some(slot) = coeffs.get_mut(off + i) {
                    *slot += c;
                }
            }
        }
        Self::normalized(lead, coeffs)
    }

    pub fn neg(&self) -> QSeries {
        QSeries {
            lead: self.lead,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn sub(&self, other: &QSeries) -> Result<QSeries> {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &BigRational) -> QSeries {
        QSeries {
            lead: self.lead,
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
        }
    }

    /// Multiplication by `q^k`.
    pub fn shift(&self, k: Lead) -> Result<QSeries> {
        let lead = self.lead + k;
        check_lead(&lead)?;
        Ok(QSeries {
            lead,
            coeffs: self.coeffs.clone(),
        })
    }

    /// Cauchy product; relative truncation is the smaller of the two.
    pub fn mul(&self, other: &QSeries) -> QSeries {
        let lead = self.lead + other.lead;
        let trunc = self.trunc().min(other.trunc());
        if self.is_zero() || other.is_zero() {
            return QSeries::zero(lead, trunc);
        }
        let (f, df) = common_denominator(&self.coeffs);
        let (g, dg) = common_denominator(&other.coeffs);
        let den = df * dg;
        let coeffs = convolve(&f, &g, trunc + 1)
            .into_iter()
            .map(|n| BigRational::new(n, den.clone()))
            .collect();
        QSeries { lead, coeffs }
    }

    /// Multiplicative inverse to the same relative order.
    pub fn reciprocal(&self) -> Result<QSeries> {
        if self.coeffs[0].is_zero() {
            return Err(Error::NonInvertible);
        }
        // f = F/D with F integral; 1/f = D/F. For B_n = b_n a0^{n+1} the
        // recurrence stays in ℤ: B_n = -Σ_{k=1}^{n} F_k a0^{k-1} B_{n-k}.
        let (f, den) = common_denominator(&self.coeffs);
        let m = self.trunc();
        let a0 = f[0].clone();
        let unit = a0.is_one();
        let mut a0_pow = Vec::with_capacity(m + 2);
        a0_pow.push(BigInt::one());
        for k in 1..=m + 1 {
            let next = if unit { BigInt::one() } else { &a0_pow[k - 1] * &a0 };
            a0_pow.push(next);
        }
        let mut b: Vec<BigInt> = Vec::with_capacity(m + 1);
        b.push(BigInt::one());
        for n in 1..=m {
            let mut acc = BigInt::zero();
            for k in 1..=n {
                if f[k].is_zero() {
                    continue;
                }
                if unit {
                    acc += &f[k] * &b[n - k];
                } else {
                    acc += &f[k] * &a0_pow[k - 1] * &b[n - k];
                }
            }
            b.push(-acc);
        }
        let coeffs = b
            .into_iter()
            .enumerate()
            .map(|(n, bn)| BigRational::new(bn * &den, a0_pow[n + 1].clone()))
            .collect();
        Ok(QSeries {
            lead: -self.lead,
            coeffs,
        })
    }

    pub fn div(&self, other: &QSeries) -> Result<QSeries> {
        Ok(self.mul(&other.reciprocal()?))
    }

    /// Exact integer power by square-and-multiply.
    pub fn pow_int(&self, e: i64) -> Result<QSeries> {
        let lead = self.lead * Lead::from_integer(e);
        check_lead(&lead)?;
        if e == 0 {
            return Ok(QSeries::one(self.trunc()));
        }
        let base = if e < 0 { self.reciprocal()? } else { self.clone() };
        let mut exp = e.unsigned_abs();
        let mut acc: Option<QSeries> = None;
        let mut sq = base;
        loop {
            if exp & 1 == 1 {
                acc = Some(match acc {
                    None => sq.clone(),
                    Some(a) => a.mul(&sq),
                });
            }
            exp >>= 1;
            if exp == 0 {
                break;
            }
            sq = sq.mul(&sq);
        }
        Ok(acc.expect("non-zero exponent"))
    }

    /// The operator θ = q d/dq: `Σ a(n) q^n ↦ Σ n a(n) q^n`.
    pub fn theta(&self) -> Result<QSeries> {
        let Some(lead) = self.integer_lead() else {
            return Err(Error::Domain(format!(
                "theta needs an integer lead, got {}",
                lead_to_string(&self.lead)
            )));
        };
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * BigRational::from_integer((lead + i as i64).into()))
            .collect();
        Self::normalized(self.lead, coeffs)
    }

    pub fn truncate(&self, m: usize) -> Result<QSeries> {
        if m == 0 {
            return Err(Error::Domain("truncation order must be positive".into()));
        }
        if m > self.trunc() {
            return Err(Error::InsufficientPrecision {
                requested: m as i64,
                available: self.trunc() as i64,
            });
        }
        Ok(QSeries {
            lead: self.lead,
            coeffs: self.coeffs[..=m].to_vec(),
        })
    }

    /// Substitution `q ↦ q^n`. Gaps between the spread coefficients are exact
    /// zeros, so the result is known through `n·(M+1) - 1` relative order.
    pub fn substitute(&self, n: u32) -> Result<QSeries> {
        if n == 0 {
            return Err(Error::Domain("substitution q -> q^0".into()));
        }
        let n = n as usize;
        let lead = self.lead * Lead::from_integer(n as i64);
        check_lead(&lead)?;
        let len = n * (self.trunc() + 1);
        let mut coeffs = vec![BigRational::zero(); len];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i * n] = c.clone();
        }
        Ok(QSeries { lead, coeffs })
    }

    /// Coefficients as integers when all of them are integral.
    pub fn integer_coefficients(&self) -> Option<Vec<BigInt>> {
        self.coeffs
            .iter()
            .map(|c| c.is_integer().then(|| c.to_integer()))
            .collect()
    }
}

impl fmt::Display for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let exp = self.lead + Lead::from_integer(i as i64);
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let mag = c.abs();
            let show_coeff = !mag.is_one() || exp.is_zero();
            if show_coeff {
                write!(f, "{mag}")?;
            }
            if !exp.is_zero() {
                if show_coeff {
                    write!(f, "*")?;
                }
                if exp.is_one() {
                    write!(f, "q")?;
                } else {
                    write!(f, "q^{}", lead_to_string(&exp))?;
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(q^{})", lead_to_string(&(self.precision() + Lead::one())))
    }
}

/// Rational lead from an `i64` pair; convenience for callers and tests.
pub fn lead(numer: i64, denom: i64) -> Lead {
    Lead::new(numer, denom)
}
