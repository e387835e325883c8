//! Coefficient (`n,a_n`) and exponent (`m,c_m`) CSV tables.
//!
//! Values are exact decimal integers or `p/q` rationals; no scientific
//! notation, no grouping. Rows are ascending and contiguous.

use std::fmt::Write as _;
use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::prodexp::ExponentSeries;
use crate::qseries::QSeries;

pub const COEFFICIENT_HEADER: &str = "n,a_n";
pub const EXPONENT_HEADER: &str = "m,c_m";

fn parse_int(s: &str) -> std::result::Result<BigInt, String> {
    let digits = s.strip_prefix('-').unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(format!("not an exact integer: {s:?}"));
    }
    s.parse::<BigInt>().map_err(|e| e.to_string())
}

/// Parses `-12` or `3/4` exactly.
pub fn parse_rational(s: &str) -> std::result::Result<BigRational, String> {
    let s = s.trim();
    match s.split_once('/') {
        None => Ok(BigRational::from_integer(parse_int(s)?)),
        Some((n, d)) => {
            let n = parse_int(n.trim())?;
            let d = parse_int(d.trim())?;
            if d.is_zero() {
                return Err("zero denominator".into());
            }
            Ok(BigRational::new(n, d))
        }
    }
}

pub fn format_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Rows of a two-column table with a fixed header, as `(index, value)`.
fn parse_table(text: &str, header: &str) -> Result<Vec<(i64, BigRational)>> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    match lines.next() {
        None => {
            return Err(Error::Parse {
                line: 1,
                msg: "empty file".into(),
            })
        }
        Some((i, l)) if l.trim().trim_start_matches('\u{feff}') != header => {
            return Err(Error::Parse {
                line: i + 1,
                msg: format!("expected header `{header}`, found `{}`", l.trim()),
            })
        }
        Some(_) => {}
    }
    let mut rows: Vec<(i64, BigRational)> = Vec::new();
    for (i, line) in lines {
        let lineno = i + 1;
        let perr = |msg: String| Error::Parse { line: lineno, msg };
        let (idx, val) = line
            .split_once(',')
            .ok_or_else(|| perr("expected two comma-separated fields".into()))?;
        if val.contains(',') {
            return Err(perr("too many fields".into()));
        }
        let idx: i64 = idx
            .trim()
            .parse()
            .map_err(|_| perr(format!("bad index {:?}", idx.trim())))?;
        let val = parse_rational(val).map_err(perr)?;
        if let Some(&(prev, _)) = rows.last() {
            if idx != prev + 1 {
                return Err(perr(format!("index {idx} does not follow {prev}")));
            }
        }
        rows.push((idx, val));
    }
    if rows.is_empty() {
        return Err(Error::Parse {
            line: 2,
            msg: "no data rows".into(),
        });
    }
    Ok(rows)
}

/// Parses a coefficient table into a normalized series known to relative
/// order `m` (leading coefficient must be exactly 1).
pub fn parse_coefficients(text: &str, m: usize) -> Result<QSeries> {
    let rows = parse_table(text, COEFFICIENT_HEADER)?;
    let Some(first) = rows.iter().position(|(_, v)| !v.is_zero()) else {
        return Err(Error::Normalization("all coefficients are zero".into()));
    };
    let (h, lead_coeff) = &rows[first];
    if !lead_coeff.is_one() {
        return Err(Error::Normalization(format!(
            "leading coefficient a({h}) = {} is not 1",
            format_rational(lead_coeff)
        )));
    }
    let available = rows.len() - 1 - first;
    if available < m {
        return Err(Error::InsufficientPrecision {
            requested: h + m as i64,
            available: h + available as i64,
        });
    }
    let coeffs = rows[first..=first + m].iter().map(|(_, v)| v.clone()).collect();
    QSeries::new(num_rational::Ratio::from_integer(*h), coeffs)
}

pub fn read_coefficients(path: &Path, m: usize) -> Result<QSeries> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_coefficients(&text, m)
}

/// Renders `n,a_n` rows for every known coefficient. The lead must be an integer.
pub fn format_coefficients(f: &QSeries) -> Result<String> {
    let h = f
        .integer_lead()
        .ok_or_else(|| Error::FractionalExponent("coefficient tables need an integer lead".into()))?;
    let mut out = String::from(COEFFICIENT_HEADER);
    out.push('\n');
    for (i, c) in f.coeffs().iter().enumerate() {
        writeln!(out, "{},{}", h + i as i64, format_rational(c)).unwrap();
    }
    Ok(out)
}

pub fn parse_exponents(text: &str, h: i64, source: &str) -> Result<ExponentSeries> {
    let rows = parse_table(text, EXPONENT_HEADER)?;
    if rows[0].0 != 1 {
        return Err(Error::Parse {
            line: 2,
            msg: format!("exponent rows must start at m = 1, found {}", rows[0].0),
        });
    }
    Ok(ExponentSeries::new(
        rows.into_iter().map(|(_, v)| v).collect(),
        h,
        source.to_string(),
    ))
}

pub fn read_exponents(path: &Path, h: i64) -> Result<ExponentSeries> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_exponents(&text, h, &path.display().to_string())
}

pub fn format_exponents(e: &ExponentSeries) -> String {
    let mut out = String::from(EXPONENT_HEADER);
    out.push('\n');
    for (i, c) in e.values().iter().enumerate() {
        writeln!(out, "{},{}", i + 1, format_rational(c)).unwrap();
    }
    out
}
