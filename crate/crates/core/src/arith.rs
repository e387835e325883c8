//! Number-theoretic primitives: Möbius function, divisor sums and lists,
//! modular inverses, Legendre symbols and Kloosterman sums.
//!
//! Factorization is plain trial division; every caller works with moduli
//! and indices far below the point where that matters.

use astro_float::{BigFloat, Consts, RoundingMode, Sign};
use num_bigint::BigUint;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::Zero;

use crate::error::{Error, Result};

/// Working precision (bits) of the Kloosterman accumulator.
pub const KLOOSTERMAN_PRECISION: usize = 192;

const RM: RoundingMode = RoundingMode::ToEven;

fn require_positive(n: u64, what: &str) -> Result<()> {
    if n == 0 {
        Err(Error::Domain(format!("{what} requires n >= 1, got 0")))
    } else {
        Ok(())
    }
}

/// Prime factorization as `(p, e)` pairs with `p` ascending.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    if n <= 1 {
        return out;
    }
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    matches!(factorize(n).as_slice(), [(_, 1)])
}

/// Distinct prime divisors of `n`, ascending.
pub fn prime_divisors(n: u64) -> Vec<u64> {
    factorize(n).into_iter().map(|(p, _)| p).collect()
}

/// The Möbius function μ(n).
pub fn mobius(n: u64) -> Result<i8> {
    require_positive(n, "mobius")?;
    let mut sign = 1i8;
    for (_, e) in factorize(n) {
        if e > 1 {
            return Ok(0);
        }
        sign = -sign;
    }
    Ok(sign)
}

/// All positive divisors of `n` in ascending order.
pub fn divisors(n: u64) -> Result<Vec<u64>> {
    require_positive(n, "divisors")?;
    let mut divs = vec![1u64];
    for (p, e) in factorize(n) {
        let len = divs.len();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                divs.push(divs[i] * pk);
            }
        }
    }
    divs.sort_unstable();
    Ok(divs)
}

/// σ_j(n) = Σ_{d|n} d^j, exact.
pub fn sigma(j: u32, n: u64) -> Result<BigUint> {
    let divs = divisors(n)?;
    Ok(divs
        .into_iter()
        .map(|d| BigUint::from(d).pow(j))
        .fold(BigUint::zero(), |acc, t| acc + t))
}

/// σ_1(n) in machine integers; `n` must be positive.
#[cfg(test)]
pub(crate) fn sigma1_u64(n: u64) -> u64 {
    factorize(n)
        .into_iter()
        .map(|(p, e)| (p.pow(e + 1) - 1) / (p - 1))
        .product()
}

/// Euler's totient φ(n); φ(0) is reported as 0.
pub fn euler_phi(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    factorize(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p - 1))
}

pub fn mod_pow(base: u64, mut exp: u64, modulus: u64) -> u64 {
    if modulus == 1 {
        return 0;
    }
    let m = modulus as u128;
    let mut acc = 1u128;
    let mut b = base as u128 % m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    acc as u64
}

/// Inverse of `d` modulo `c` via the extended Euclidean algorithm.
/// `None` when `gcd(d, c) != 1`. Modulo 1 every residue is 0, whose inverse is 0.
pub fn mod_inverse(d: u64, c: u64) -> Option<u64> {
    if c == 0 {
        return None;
    }
    if c == 1 {
        return Some(0);
    }
    let ext = (d as i128 % c as i128).extended_gcd(&(c as i128));
    if ext.gcd != 1 {
        return None;
    }
    Some(ext.x.rem_euclid(c as i128) as u64)
}

/// Legendre symbol (a/p) for an odd prime `p`, by Euler's criterion.
pub fn legendre(a: i64, p: u64) -> i8 {
    debug_assert!(p > 2 && is_prime(p));
    let r = a.rem_euclid(p as i64) as u64;
    if r == 0 {
        return 0;
    }
    if mod_pow(r, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// A Kloosterman sum K(a, b; c) = Σ_{d mod c, (d,c)=1} e((a d + b d*)/c).
#[derive(Debug, Clone)]
pub struct KloostermanSum {
    pub a: i64,
    pub b: i64,
    pub c: u64,
    /// The sum rounded to double precision.
    pub value: Complex64,
    /// Real part carried at [`KLOOSTERMAN_PRECISION`] bits.
    pub exact_real: BigFloat,
}

impl KloostermanSum {
    /// τ(c)·√gcd(a, b, c)·√c.
    pub fn weil_bound(&self) -> f64 {
        weil_bound(self.a, self.b, self.c)
    }

    pub fn satisfies_weil_bound(&self) -> bool {
        // slack covers rounding of the final conversion only
        self.value.norm() <= self.weil_bound() * (1.0 + 1e-12)
    }
}

pub fn weil_bound(a: i64, b: i64, c: u64) -> f64 {
    let g = (a.unsigned_abs()).gcd(&b.unsigned_abs()).gcd(&c);
    let tau = divisors(c).map(|d| d.len()).unwrap_or(0) as f64;
    tau * (g as f64).sqrt() * (c as f64).sqrt()
}

/// Evaluates `K(a, b; c)` by direct enumeration over the units modulo `c`.
pub fn kloosterman(a: i64, b: i64, c: u64) -> Result<KloostermanSum> {
    Ok(KloostermanTable::new(c)?.sum(a, b))
}

/// High-precision table of e(k/c) for one modulus, reusable across many
/// `(a, b)` pairs.
#[derive(Debug, Clone)]
pub struct KloostermanTable {
    c: u64,
    cos: Vec<BigFloat>,
    sin: Vec<BigFloat>,
}

impl KloostermanTable {
    pub fn new(c: u64) -> Result<Self> {
        require_positive(c, "kloosterman modulus")?;
        let p = KLOOSTERMAN_PRECISION;
        let n = c as usize;
        let mut cos = vec![BigFloat::from_u64(0, p); n];
        let mut sin = vec![BigFloat::from_u64(0, p); n];
        cos[0] = BigFloat::from_u64(1, p);
        if n > 1 {
            let mut cc = Consts::new().map_err(|e| Error::Domain(format!("{e:?}")))?;
            let step = cc
                .pi(p + 64, RM)
                .mul(&BigFloat::from_u64(2, p + 64), p + 64, RM)
                .div(&BigFloat::from_u64(c, p + 64), p + 64, RM);
            let wc = step.cos(p + 64, RM, &mut cc);
            let ws = step.sin(p + 64, RM, &mut cc);
            // rotate up to c/2 and mirror; rounding error grows linearly in k
            // and stays far below the working precision
            let (mut re, mut im) = (BigFloat::from_u64(1, p + 64), BigFloat::from_u64(0, p + 64));
            for k in 1..=n / 2 {
                let nr = re.mul(&wc, p + 64, RM).sub(&im.mul(&ws, p + 64, RM), p + 64, RM);
                let ni = re.mul(&ws, p + 64, RM).add(&im.mul(&wc, p + 64, RM), p + 64, RM);
                re = nr;
                im = ni;
                cos[k] = re.clone();
                sin[k] = im.clone();
                cos[n - k] = re.clone();
                sin[n - k] = im.neg();
            }
        }
        Ok(KloostermanTable { c, cos, sin })
    }

    pub fn modulus(&self) -> u64 {
        self.c
    }

    /// Multiplicity of each residue `a d + b d*` mod c over the units d.
    fn residue_counts(&self, a: i64, b: i64) -> Vec<u32> {
        let c = self.c;
        let mut counts = vec![0u32; c as usize];
        let am = a.rem_euclid(c as i64) as u128;
        let bm = b.rem_euclid(c as i64) as u128;
        for d in 0..c {
            if let Some(dinv) = mod_inverse(d, c) {
                let k = (am * d as u128 + bm * dinv as u128) % c as u128;
                counts[k as usize] += 1;
            }
        }
        counts
    }

    pub fn sum(&self, a: i64, b: i64) -> KloostermanSum {
        let p = KLOOSTERMAN_PRECISION;
        let mut re = BigFloat::from_u64(0, p);
        let mut im = BigFloat::from_u64(0, p);
        for (k, &n) in self.residue_counts(a, b).iter().enumerate() {
            if n == 0 {
                continue;
            }
            let w = BigFloat::from_u32(n, p);
            re = re.add(&self.cos[k].mul(&w, p, RM), p, RM);
            im = im.add(&self.sin[k].mul(&w, p, RM), p, RM);
        }
        KloostermanSum {
            a,
            b,
            c: self.c,
            value: Complex64::new(bigfloat_to_f64(&re), bigfloat_to_f64(&im)),
            exact_real: re,
        }
    }
}

/// Nearest double to a finite `BigFloat` (NaN for NaN/Inf inputs).
pub fn bigfloat_to_f64(x: &BigFloat) -> f64 {
    let Some((words, _, sign, exp, _)) = x.as_raw_parts() else {
        return f64::NAN;
    };
    if x.is_zero() {
        return 0.0;
    }
    // value = 0.m × 2^exp with the mantissa words little-endian
    let hi = words[words.len() - 1] as u128;
    let lo = if words.len() > 1 { words[words.len() - 2] as u128 } else { 0 };
    let top = (hi << 64) | lo;
    let v = top as f64 * 2f64.powi(exp - 128);
    match sign {
        Sign::Neg => -v,
        Sign::Pos => v,
    }
}

/// Σ_{d|n} f(d), the usual Dirichlet-style divisor sum over exact integers.
#[cfg(test)]
pub(crate) fn divisor_sum<T, F>(n: u64, mut f: F) -> T
where
    T: Zero,
    F: FnMut(u64) -> T,
{
    divisors(n)
        .expect("positive n")
        .into_iter()
        .fold(T::zero(), |acc, d| acc + f(d))
}
