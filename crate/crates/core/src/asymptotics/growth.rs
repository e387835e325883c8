//! Growth-rate regression on product exponents and the bound checks built on it.

use std::f64::consts::{LN_2, PI};
use std::fmt::{self, Write as _};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::prodexp::ExponentSeries;

/// Note attached to reports computed from level-1 forms.
pub const LEVEL_ONE_PROXY_NOTE: &str =
    "level-1 proxy: the form lives on SL2(Z) and stands in for a Gamma_0(N) form";

/// `ln|x|` for a non-zero big integer: leading 64 bits plus the bit length.
pub fn ln_abs_bigint(x: &BigInt) -> f64 {
    let bits = x.bits();
    let mag = x.magnitude();
    if bits <= 64 {
        return (mag.to_u64().expect("fits") as f64).ln();
    }
    let shift = bits - 64;
    let top = (mag >> shift).to_u64().expect("64 bits");
    (top as f64).ln() + shift as f64 * LN_2
}

/// `ln|r|` for a non-zero rational; `-inf` for zero.
pub fn ln_abs_rational(r: &BigRational) -> f64 {
    if r.is_zero() {
        return f64::NEG_INFINITY;
    }
    ln_abs(r.numer()) - ln_abs(r.denom())
}

fn ln_abs(x: &BigInt) -> f64 {
    if x.bits() <= 64 {
        (x.abs().to_u64().expect("fits") as f64).ln()
    } else {
        ln_abs_bigint(x)
    }
}

/// Ordinary least squares fit `y ≈ slope·x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub residual_rms: f64,
}

/// Least squares with a fixed summation order. Needs two distinct `x`.
pub fn ols(xs: &[f64], ys: &[f64]) -> LineFit {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - (slope * x + intercept);
            r * r
        })
        .sum();
    LineFit {
        slope,
        intercept,
        residual_rms: (sse / n).sqrt(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthFit {
    pub y_hat: f64,
    pub slope: f64,
    pub intercept: f64,
    pub window: (usize, usize),
    pub residual_rms: f64,
    pub points_used: usize,
    pub note: Option<String>,
}

fn check_window(e: &ExponentSeries, (m0, m1): (usize, usize)) -> Result<()> {
    if m0 == 0 || m0 > m1 || m1 > e.order() {
        return Err(Error::Domain(format!(
            "window [{m0}, {m1}] not within [1, {}]",
            e.order()
        )));
    }
    Ok(())
}

/// Non-zero exponents in the window as `(m, ln|c(m)|)`.
fn log_points(e: &ExponentSeries, (m0, m1): (usize, usize)) -> Vec<(usize, f64)> {
    (m0..=m1)
        .filter_map(|m| {
            let c = e.get(m)?;
            (!c.is_zero()).then(|| (m, ln_abs_rational(c)))
        })
        .collect()
}

fn proxy_note(e: &ExponentSeries) -> Option<String> {
    (e.level() == Some(1)).then(|| LEVEL_ONE_PROXY_NOTE.to_string())
}

/// Regresses `ln|c(m)| + (3/2) ln m` on `m`; the slope estimates `2π y_r`.
pub fn growth_fit(e: &ExponentSeries, window: (usize, usize)) -> Result<GrowthFit> {
    check_window(e, window)?;
    let pts = log_points(e, window);
    if pts.len() < 5 {
        return Err(Error::InsufficientData(format!(
            "{} non-zero exponents in [{}, {}], need at least 5",
            pts.len(),
            window.0,
            window.1
        )));
    }
    let xs: Vec<f64> = pts.iter().map(|&(m, _)| m as f64).collect();
    let us: Vec<f64> = pts
        .iter()
        .map(|&(m, ln_c)| ln_c + 1.5 * (m as f64).ln())
        .collect();
    let fit = ols(&xs, &us);
    Ok(GrowthFit {
        y_hat: fit.slope / (2.0 * PI),
        slope: fit.slope,
        intercept: fit.intercept,
        window,
        residual_rms: fit.residual_rms,
        points_used: pts.len(),
        note: proxy_note(e),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    /// `|c(m)| ≪ e^{2πm y_r}/m^{3/2}`.
    Upper,
    /// `|c(m)| = Ω(e^{2πm y_r}/m^{3/2})`.
    Omega,
    /// `|c(m)| ≪ ln m · ln ln m`.
    Kohnen,
}

impl BoundKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundKind::Upper => "upper",
            BoundKind::Omega => "omega",
            BoundKind::Kohnen => "kohnen",
        }
    }
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BoundKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "upper" => Ok(BoundKind::Upper),
            "omega" => Ok(BoundKind::Omega),
            "kohnen" => Ok(BoundKind::Kohnen),
            _ => Err(Error::Domain(format!("unknown bound kind {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
        }
    }

    pub fn passed(self) -> bool {
        self == Verdict::Pass
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub kind: BoundKind,
    pub window: (usize, usize),
    /// `(m, r(m))` over the non-zero exponents in the window.
    pub ratios: Vec<(usize, f64)>,
    /// Least-squares slope of `ln r(m)` against `m`.
    pub log_slope: f64,
    pub max_ratio: f64,
    pub slope_tol: f64,
    pub verdict: Verdict,
    pub note: Option<String>,
}

/// Computes the ratio `r(m)` for `kind` and judges its log-slope.
///
/// upper: `r = |c|·m^{3/2}·e^{-2πm y_r}`, passes if the slope is at most `slope_tol`;
/// omega: same ratio, passes if the slope is at least `-slope_tol`;
/// kohnen: `r = |c|/(ln m · ln ln m)` for `m ≥ 16`, passes if the slope is at most `slope_tol`.
pub fn check_bound(
    e: &ExponentSeries,
    kind: BoundKind,
    y_r: Option<f64>,
    window: (usize, usize),
    slope_tol: f64,
) -> Result<BoundReport> {
    check_window(e, window)?;
    let y = match (kind, y_r) {
        (BoundKind::Kohnen, _) => 0.0,
        (_, Some(y)) => y,
        (_, None) => {
            return Err(Error::Domain(format!("{kind} bound needs y_r")));
        }
    };
    if kind == BoundKind::Kohnen && window.0 < 16 {
        return Err(Error::Domain(format!(
            "kohnen bound needs a window starting at m >= 16, got {}",
            window.0
        )));
    }
    let pts = log_points(e, window);
    if pts.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "{} non-zero exponents in [{}, {}], need at least 2",
            pts.len(),
            window.0,
            window.1
        )));
    }
    let ln_ratios: Vec<(usize, f64)> = pts
        .iter()
        .map(|&(m, ln_c)| {
            let mf = m as f64;
            let ln_r = match kind {
                BoundKind::Upper | BoundKind::Omega => ln_c + 1.5 * mf.ln() - 2.0 * PI * mf * y,
                BoundKind::Kohnen => ln_c - (mf.ln() * mf.ln().ln()).ln(),
            };
            (m, ln_r)
        })
        .collect();
    let xs: Vec<f64> = ln_ratios.iter().map(|&(m, _)| m as f64).collect();
    let ys: Vec<f64> = ln_ratios.iter().map(|&(_, l)| l).collect();
    let log_slope = ols(&xs, &ys).slope;
    let max_ln = ys.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let pass = match kind {
        BoundKind::Upper | BoundKind::Kohnen => log_slope <= slope_tol,
        BoundKind::Omega => log_slope >= -slope_tol,
    };
    Ok(BoundReport {
        kind,
        window,
        ratios: ln_ratios.iter().map(|&(m, l)| (m, l.exp())).collect(),
        log_slope,
        max_ratio: max_ln.exp(),
        slope_tol,
        verdict: if pass { Verdict::Pass } else { Verdict::Fail },
        note: proxy_note(e),
    })
}

/// Decimal rendering with at least 15 significant digits; positional in the
/// everyday range, exponent form outside it. Non-finite values become `null`.
pub fn json_number(x: f64) -> String {
    if !x.is_finite() {
        return "null".into();
    }
    if x == 0.0 {
        return "0.0".into();
    }
    let mag = x.abs().log10().floor() as i32;
    if (-6..21).contains(&mag) {
        let decimals = (14 - mag).max(1) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.14e}")
    }
}

fn json_string(s: &str) -> String {
    serde_json::to_string(s).expect("string serializes")
}

impl GrowthFit {
    pub fn to_json(&self) -> String {
        let mut out = String::from("{\n");
        writeln!(out, "  \"y_hat\": {},", json_number(self.y_hat)).unwrap();
        writeln!(out, "  \"slope\": {},", json_number(self.slope)).unwrap();
        writeln!(out, "  \"intercept\": {},", json_number(self.intercept)).unwrap();
        writeln!(out, "  \"window\": [{}, {}],", self.window.0, self.window.1).unwrap();
        writeln!(out, "  \"residual_rms\": {},", json_number(self.residual_rms)).unwrap();
        write!(out, "  \"points_used\": {}", self.points_used).unwrap();
        if let Some(note) = &self.note {
            write!(out, ",\n  \"note\": {}", json_string(note)).unwrap();
        }
        out.push_str("\n}\n");
        out
    }
}

impl BoundReport {
    pub fn to_json(&self) -> String {
        let mut out = String::from("{\n");
        writeln!(out, "  \"kind\": {},", json_string(self.kind.as_str())).unwrap();
        writeln!(out, "  \"log_slope\": {},", json_number(self.log_slope)).unwrap();
        writeln!(out, "  \"max_ratio\": {},", json_number(self.max_ratio)).unwrap();
        writeln!(out, "  \"verdict\": {},", json_string(self.verdict.as_str())).unwrap();
        write!(out, "  \"window\": [{}, {}]", self.window.0, self.window.1).unwrap();
        if let Some(note) = &self.note {
            write!(out, ",\n  \"note\": {}", json_string(note)).unwrap();
        }
        out.push_str("\n}\n");
        out
    }
}
