use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::parse_rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormKind {
    EtaQuotient,
    Eisenstein,
    Delta,
    File,
    Product,
    LinearCombination,
    Power,
}

/// Declarative description of a modular form, read from JSON.
///
/// Which optional fields are required depends on `kind`:
/// `eta_exponents` for eta-quotients, `eisenstein_weight` (and optionally
/// `scale`) for Eisenstein series, `path` for coefficient files,
/// `children` for the compound kinds, plus `coefficients` for linear
/// combinations and `exponent` for powers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormSpec {
    pub kind: FormKind,
    pub level: u64,
    pub weight: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta_exponents: Option<BTreeMap<u64, i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eisenstein_weight: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub children: Option<Vec<FormSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exponent: Option<i64>,
}

fn spec_err(msg: impl Into<String>) -> Error {
    Error::Spec(msg.into())
}

impl FormSpec {
    fn bare(kind: FormKind, level: u64, weight: i64) -> Self {
        FormSpec {
            kind,
            level,
            weight,
            eta_exponents: None,
            eisenstein_weight: None,
            scale: None,
            path: None,
            children: None,
            coefficients: None,
            exponent: None,
        }
    }

    /// Π_{d|N} η(dz)^{r_d}; the weight is derived as Σ r_d / 2.
    pub fn eta_quotient(level: u64, exponents: &[(u64, i64)]) -> Self {
        let total: i64 = exponents.iter().map(|&(_, r)| r).sum();
        let mut s = Self::bare(FormKind::EtaQuotient, level, total / 2);
        s.eta_exponents = Some(exponents.iter().copied().collect());
        s
    }

    pub fn eisenstein(k: u32) -> Self {
        let mut s = Self::bare(FormKind::Eisenstein, 1, k as i64);
        s.eisenstein_weight = Some(k);
        s
    }

    /// E_k(d·z), a form of level `d`.
    pub fn eisenstein_scaled(k: u32, d: u64) -> Self {
        let mut s = Self::eisenstein(k);
        s.level = d;
        s.scale = Some(d);
        s
    }

    pub fn delta() -> Self {
        Self::bare(FormKind::Delta, 1, 12)
    }

    pub fn file(path: impl Into<PathBuf>, level: u64, weight: i64) -> Self {
        let mut s = Self::bare(FormKind::File, level, weight);
        s.path = Some(path.into());
        s
    }

    pub fn product(level: u64, children: Vec<FormSpec>) -> Self {
        let weight = children.iter().map(|c| c.weight).sum();
        let mut s = Self::bare(FormKind::Product, level, weight);
        s.children = Some(children);
        s
    }

    pub fn power(child: FormSpec, exponent: i64) -> Self {
        let mut s = Self::bare(FormKind::Power, child.level, child.weight * exponent);
        s.children = Some(vec![child]);
        s.exponent = Some(exponent);
        s
    }

    pub fn linear_combination(level: u64, weight: i64, terms: Vec<(String, FormSpec)>) -> Self {
        let mut s = Self::bare(FormKind::LinearCombination, level, weight);
        let (coeffs, children) = terms.into_iter().unzip();
        s.coefficients = Some(coeffs);
        s.children = Some(children);
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: FormSpec =
            serde_json::from_str(text).map_err(|e| spec_err(format!("malformed JSON: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }

    /// Reads and validates a spec file; relative `path` fields are resolved
    /// against the directory holding the spec.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut spec = Self::from_json(&text)?;
        if let Some(dir) = path.parent() {
            spec.resolve_paths(dir);
        }
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }

    fn resolve_paths(&mut self, base: &Path) {
        if let Some(p) = &self.path {
            if p.is_relative() {
                self.path = Some(base.join(p));
            }
        }
        for c in self.children.iter_mut().flatten() {
            c.resolve_paths(base);
        }
    }

    /// Σ d·r_d for an eta-quotient.
    pub fn eta_order_times_24(&self) -> Option<i64> {
        self.eta_exponents
            .as_ref()
            .map(|m| m.iter().map(|(&d, &r)| d as i64 * r).sum())
    }

    pub(crate) fn children_checked(&self) -> Result<&[FormSpec]> {
        match &self.children {
            Some(c) if !c.is_empty() => Ok(c),
            _ => Err(spec_err(format!("{:?} spec needs non-empty children", self.kind))),
        }
    }

    pub(crate) fn parsed_coefficients(&self) -> Result<Vec<BigRational>> {
        let raw = self
            .coefficients
            .as_ref()
            .ok_or_else(|| spec_err("linear_combination needs coefficients"))?;
        raw.iter()
            .map(|s| parse_rational(s).map_err(|m| spec_err(format!("coefficient {s:?}: {m}"))))
            .collect()
    }

    /// Checks every invariant that can be checked without expanding anything.
    pub fn validate(&self) -> Result<()> {
        if self.level == 0 {
            return Err(spec_err("level must be positive"));
        }
        if self.weight < 0 {
            return Err(spec_err(format!("weight must be non-negative, got {}", self.weight)));
        }
        let forbid = |present: bool, field: &str| {
            if present {
                Err(spec_err(format!("field `{field}` not allowed for {:?}", self.kind)))
            } else {
                Ok(())
            }
        };
        match self.kind {
            FormKind::EtaQuotient => {
                let exps = self
                    .eta_exponents
                    .as_ref()
                    .filter(|m| !m.is_empty())
                    .ok_or_else(|| spec_err("eta_quotient needs eta_exponents"))?;
                for &d in exps.keys() {
                    if d == 0 || self.level % d != 0 {
                        return Err(spec_err(format!(
                            "eta exponent key {d} does not divide level {}",
                            self.level
                        )));
                    }
                }
                let order = self.eta_order_times_24().unwrap_or(0);
                if order.rem_euclid(24) != 0 {
                    return Err(Error::FractionalExponent(format!(
                        "sum of d*r_d = {order} is not divisible by 24"
                    )));
                }
                let total: i64 = exps.values().sum();
                if total % 2 != 0 || total / 2 != self.weight {
                    return Err(spec_err(format!(
                        "declared weight {} does not equal (sum of r_d)/2 = {total}/2",
                        self.weight
                    )));
                }
                forbid(self.children.is_some(), "children")?;
                forbid(self.path.is_some(), "path")?;
            }
            FormKind::Eisenstein => {
                let k = self
                    .eisenstein_weight
                    .ok_or_else(|| spec_err("eisenstein needs eisenstein_weight"))?;
                if ![2, 4, 6].contains(&k) {
                    return Err(spec_err(format!("eisenstein_weight must be 2, 4 or 6, got {k}")));
                }
                if k as i64 != self.weight {
                    return Err(spec_err(format!(
                        "declared weight {} does not match eisenstein_weight {k}",
                        self.weight
                    )));
                }
                let d = self.scale.unwrap_or(1);
                if d == 0 || self.level % d != 0 {
                    return Err(spec_err(format!("scale {d} does not divide level {}", self.level)));
                }
                forbid(self.eta_exponents.is_some(), "eta_exponents")?;
                forbid(self.children.is_some(), "children")?;
            }
            FormKind::Delta => {
                if self.weight != 12 {
                    return Err(spec_err(format!("delta has weight 12, declared {}", self.weight)));
                }
                forbid(self.eta_exponents.is_some(), "eta_exponents")?;
                forbid(self.children.is_some(), "children")?;
            }
            FormKind::File => {
                if self.path.is_none() {
                    return Err(spec_err("file spec needs path"));
                }
                forbid(self.children.is_some(), "children")?;
            }
            FormKind::Product => {
                let children = self.children_checked()?;
                let w: i64 = children.iter().map(|c| c.weight).sum();
                if w != self.weight {
                    return Err(spec_err(format!(
                        "product weight {} does not equal the sum of child weights {w}",
                        self.weight
                    )));
                }
                children.iter().try_for_each(FormSpec::validate)?;
            }
            FormKind::Power => {
                let children = self.children_checked()?;
                if children.len() != 1 {
                    return Err(spec_err("power needs exactly one child"));
                }
                let e = self.exponent.ok_or_else(|| spec_err("power needs exponent"))?;
                if children[0].weight * e != self.weight {
                    return Err(spec_err(format!(
                        "power weight {} does not equal {} * {e}",
                        self.weight, children[0].weight
                    )));
                }
                children[0].validate()?;
            }
            FormKind::LinearCombination => {
                let children = self.children_checked()?;
                let coeffs = self.parsed_coefficients()?;
                if coeffs.len() != children.len() {
                    return Err(spec_err("coefficients and children differ in length"));
                }
                if let Some(c) = children.iter().find(|c| c.weight != self.weight) {
                    return Err(spec_err(format!(
                        "linear_combination of weight {} has a child of weight {}",
                        self.weight, c.weight
                    )));
                }
                children.iter().try_for_each(FormSpec::validate)?;
            }
        }
        Ok(())
    }
}
