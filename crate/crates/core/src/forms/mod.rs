//! q-expansions of eta-quotients, Eisenstein series and Δ, the weight-2
//! completion `f_θ` of θf/f, and level data for Γ_0(N).

mod level;
mod spec;

use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub use level::{level_data, LevelData};
pub use spec::{FormKind, FormSpec};

use crate::arith::sigma;
use crate::error::{Error, Result};
use crate::io;
use crate::qseries::{Lead, QSeries};

/// Π_{n≥1} (1 - q^n) to order `m`, from Euler's pentagonal number theorem.
fn euler_product(m: usize) -> Vec<BigInt> {
    let mut c = vec![BigInt::zero(); m + 1];
    c[0] = BigInt::one();
    for k in 1i64.. {
        let p1 = (k * (3 * k - 1) / 2) as usize;
        if p1 > m {
            break;
        }
        let sign = if k % 2 == 0 { BigInt::one() } else { -BigInt::one() };
        c[p1] += &sign;
        let p2 = (k * (3 * k + 1) / 2) as usize;
        if p2 <= m {
            c[p2] += sign;
        }
    }
    c
}

/// `η(d·z) = q^{d/24} Π (1 - q^{dm})`, known to relative order `m·d`.
pub fn eta(d: u32, m: usize) -> Result<QSeries> {
    if d == 0 || m == 0 {
        return Err(Error::Domain("eta needs a positive scale and order".into()));
    }
    let base = QSeries::from_bigints(0, euler_product(m))?;
    base.substitute(d)?
        .shift(Lead::new(d as i64, 24))?
        .truncate(m * d as usize)
}

/// Normalized Eisenstein series E_k, k ∈ {2, 4, 6}, to order `m`.
pub fn eisenstein(k: u32, m: usize) -> Result<QSeries> {
    let factor: i64 = match k {
        2 => -24,
        4 => 240,
        6 => -504,
        _ => return Err(Error::Domain(format!("Eisenstein weight {k} not supported"))),
    };
    let mut coeffs = Vec::with_capacity(m + 1);
    coeffs.push(BigInt::one());
    for n in 1..=m as u64 {
        coeffs.push(BigInt::from(factor) * BigInt::from(sigma(k - 1, n)?));
    }
    QSeries::from_bigints(0, coeffs)
}

/// E_2(N·z) to order `m`.
pub fn e2_scaled(n: u32, m: usize) -> Result<QSeries> {
    let base = eisenstein(2, m.div_ceil(n as usize).max(1))?;
    base.substitute(n)?.truncate(m)
}

/// Δ = η(z)^24 to order `m`.
pub fn delta(m: usize) -> Result<QSeries> {
    eta(1, m)?.pow_int(24)?.truncate(m)
}

/// Expands `spec` to relative order `m` with leading coefficient 1.
pub fn build(spec: &FormSpec, m: usize) -> Result<QSeries> {
    spec.validate()?;
    build_unchecked(spec, m)
}

fn build_unchecked(spec: &FormSpec, m: usize) -> Result<QSeries> {
    if m == 0 {
        return Err(Error::Domain("truncation order must be positive".into()));
    }
    let f = match spec.kind {
        FormKind::EtaQuotient => {
            let exps = spec.eta_exponents.as_ref().expect("validated");
            let mut acc = QSeries::one(m);
            for (&d, &r) in exps {
                if r != 0 {
                    acc = acc.mul(&eta(d as u32, m)?.pow_int(r)?);
                }
            }
            let f = acc.truncate(m)?;
            let h = spec.eta_order_times_24().expect("validated") / 24;
            if f.integer_lead() != Some(h) {
                return Err(Error::Consistency(format!(
                    "eta-quotient lead {} differs from sum d*r_d/24 = {h}",
                    f.lead()
                )));
            }
            f
        }
        FormKind::Eisenstein => {
            let k = spec.eisenstein_weight.expect("validated");
            let d = spec.scale.unwrap_or(1) as u32;
            eisenstein(k, m.div_ceil(d as usize))?.substitute(d)?.truncate(m)?
        }
        FormKind::Delta => delta(m)?,
        FormKind::File => ingest_coefficients(spec.path.as_deref().expect("validated"), m)?,
        FormKind::Product => {
            let mut acc = QSeries::one(m);
            for child in spec.children_checked()? {
                acc = acc.mul(&build_unchecked(child, m)?);
            }
            acc
        }
        FormKind::Power => {
            let child = &spec.children_checked()?[0];
            build_unchecked(child, m)?.pow_int(spec.exponent.expect("validated"))?
        }
        FormKind::LinearCombination => {
            let coeffs = spec.parsed_coefficients()?;
            let mut acc: Option<QSeries> = None;
            for (c, child) in coeffs.iter().zip(spec.children_checked()?) {
                let term = build_unchecked(child, m)?.scale(c);
                acc = Some(match acc {
                    None => term,
                    Some(a) => a.add(&term)?,
                });
            }
            let acc = acc.expect("non-empty children");
            if acc.is_zero() {
                return Err(Error::Normalization(
                    "linear combination vanishes to the requested order".into(),
                ));
            }
            let lc = acc.leading_coefficient().clone();
            acc.scale(&(BigRational::one() / lc))
        }
    };
    if !f.leading_coefficient().is_one() {
        return Err(Error::Normalization(format!(
            "leading coefficient {} is not 1",
            f.leading_coefficient()
        )));
    }
    Ok(f)
}

/// Reads a coefficient table (see [`crate::io`]) to relative order `m`.
pub fn ingest_coefficients(path: &Path, m: usize) -> Result<QSeries> {
    io::read_coefficients(path, m)
}

/// `f_θ = θf/f + ((k/12 - h)/(N-1))·N·E_2(Nz) + ((h - Nk/12)/(N-1))·E_2(z)`
/// to order `m`. `f` must have lead `h` and leading coefficient 1.
pub fn f_theta(f: &QSeries, k: i64, h: i64, n: u64, m: usize) -> Result<QSeries> {
    if n < 2 {
        return Err(Error::UnsupportedLevel);
    }
    if f.integer_lead() != Some(h) || !f.leading_coefficient().is_one() {
        return Err(Error::Normalization(format!(
            "f_theta needs a(h) = 1 at h = {h}; series has lead {} with coefficient {}",
            f.lead(),
            f.leading_coefficient()
        )));
    }
    if f.trunc() < m {
        return Err(Error::InsufficientPrecision {
            requested: m as i64,
            available: f.trunc() as i64,
        });
    }
    let (alpha, beta) = f_theta_weights(k, h, n);
    let log_deriv = f.truncate(m)?.theta()?.div(f)?;
    let big_n = BigRational::from_integer(n.into());
    let e2n = e2_scaled(n as u32, m)?.scale(&(alpha * big_n));
    let e2 = eisenstein(2, m)?.scale(&beta);
    log_deriv.add(&e2n)?.add(&e2)
}

/// The two Eisenstein weights `(k/12 - h)/(N-1)` and `(h - Nk/12)/(N-1)`.
pub fn f_theta_weights(k: i64, h: i64, n: u64) -> (BigRational, BigRational) {
    let r = |a: i64, b: i64| BigRational::new(a.into(), b.into());
    let nm1 = n as i64 - 1;
    let k12 = r(k, 12);
    let alpha = (&k12 - r(h, 1)) / r(nm1, 1);
    let beta = (r(h, 1) - k12 * r(n as i64, 1)) / r(nm1, 1);
    (alpha, beta)
}

/// Built-in specs, each expandable and round-trippable through the CSV format.
pub fn builtin_specs() -> Vec<(&'static str, FormSpec)> {
    vec![
        ("delta", FormSpec::delta()),
        ("e4", FormSpec::eisenstein(4)),
        ("e6", FormSpec::eisenstein(6)),
        ("eta11", FormSpec::eta_quotient(11, &[(1, 2), (11, 2)])),
        ("eta2", FormSpec::eta_quotient(2, &[(1, 8), (2, 8)])),
        ("eta4", FormSpec::eta_quotient(4, &[(1, 8), (2, -8), (4, 8)])),
    ]
}

pub fn builtin_spec(name: &str) -> Option<FormSpec> {
    builtin_specs()
        .into_iter()
        .find(|(n, _)| *n == name)
        .map(|(_, s)| s)
}

/// Weight-2 newforms that are eta-quotients, for the genus-one levels where one exists.
pub fn eta_newform(level: u64) -> Option<FormSpec> {
    let exps: &[(u64, i64)] = match level {
        11 => &[(1, 2), (11, 2)],
        14 => &[(1, 1), (2, 1), (7, 1), (14, 1)],
        15 => &[(1, 1), (3, 1), (5, 1), (15, 1)],
        20 => &[(2, 2), (10, 2)],
        24 => &[(2, 1), (4, 1), (6, 1), (12, 1)],
        27 => &[(3, 2), (9, 2)],
        32 => &[(4, 2), (8, 2)],
        36 => &[(6, 4)],
        _ => return None,
    };
    Some(FormSpec::eta_quotient(level, exps))
}
