use serde::Serialize;

use crate::arith::{divisors, euler_phi, legendre, prime_divisors};
use crate::error::{Error, Result};

/// Index, elliptic points, cusps and genus of Γ_0(N).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LevelData {
    pub level: u64,
    pub index: u64,
    pub nu2: u64,
    pub nu3: u64,
    pub nu_inf: u64,
    pub genus: u64,
}

// Kronecker symbols (-1/p) and (-3/p); Euler's criterion for odd p.
fn chi_minus1(p: u64) -> i64 {
    if p == 2 {
        0
    } else {
        legendre(-1, p) as i64
    }
}

fn chi_minus3(p: u64) -> i64 {
    match p {
        2 => -1,
        3 => 0,
        _ => legendre(-3, p) as i64,
    }
}

pub fn level_data(n: u64) -> Result<LevelData> {
    if n == 0 {
        return Err(Error::Domain("level must be positive".into()));
    }
    let primes = prime_divisors(n);
    let index = primes.iter().fold(n, |acc, &p| acc / p * (p + 1));
    let nu2 = if n % 4 == 0 {
        0
    } else {
        primes.iter().map(|&p| 1 + chi_minus1(p)).product::<i64>() as u64
    };
    let nu3 = if n % 9 == 0 {
        0
    } else {
        primes.iter().map(|&p| 1 + chi_minus3(p)).product::<i64>() as u64
    };
    let nu_inf: u64 = divisors(n)?
        .into_iter()
        .map(|d| euler_phi(num_integer::gcd(d, n / d)))
        .sum();
    // 12 g = 12 + μ - 3ν₂ - 4ν₃ - 6ν∞
    let twelve_g = 12 + index as i64 - 3 * nu2 as i64 - 4 * nu3 as i64 - 6 * nu_inf as i64;
    if twelve_g < 0 || twelve_g % 12 != 0 {
        return Err(Error::Consistency(format!(
            "genus formula gave {twelve_g}/12 for N = {n}"
        )));
    }
    Ok(LevelData {
        level: n,
        index,
        nu2,
        nu3,
        nu_inf,
        genus: (twelve_g / 12) as u64,
    })
}
