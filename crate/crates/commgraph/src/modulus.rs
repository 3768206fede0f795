//! Factorization of the modulus and the coprime-splitting facts that drive
//! the witness constructions.

use crate::error::{Error, Result};
use num_bigint::BigUint;
use num_integer::Integer;

/// How a modulus m >= 2 splits for the constructive arguments.
///
/// `CoprimeSplit { s, t }` satisfies s*t = m, gcd(s, t) = 1, s > 1, t > 1,
/// with s the full power of the smallest prime factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModulusClass {
    Prime(u64),
    PrimePower { p: u64, t: u32 },
    CoprimeSplit { s: u64, t: u64 },
}

/// Prime factorization by trial division, ascending primes.
pub fn factorize(m: u64) -> Result<Vec<(u64, u32)>> {
    if m < 2 {
        return Err(Error::InvalidModulus(m));
    }
    let mut rest = m;
    let mut out: Vec<(u64, u32)> = Vec::new();
    let mut d: u64 = 2;
    while d.saturating_mul(d) <= rest {
        if rest % d == 0 {
            let mut e = 0u32;
            while rest % d == 0 {
                rest /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if rest > 1 {
        out.push((rest, 1));
    }
    Ok(out)
}

pub fn is_prime(m: u64) -> bool {
    matches!(factorize(m), Ok(f) if f.len() == 1 && f[0].1 == 1)
}

/// Classify m as prime, a proper prime power, or a coprime split s*t.
pub fn classify(m: u64) -> Result<ModulusClass> {
    let factors = factorize(m)?;
    if factors.len() == 1 {
        let (p, t) = factors[0];
        return Ok(if t == 1 {
            ModulusClass::Prime(p)
        } else {
            ModulusClass::PrimePower { p, t }
        });
    }
    let (p, e) = factors[0];
    let s = p.pow(e);
    Ok(ModulusClass::CoprimeSplit { s, t: m / s })
}

/// Check that u*s^k + v*t^l is a unit mod s*t.
///
/// Preconditions: u, v, s, t pairwise coprime and k, l >= 1; violations are
/// reported as errors, not as a `false` result.
pub fn check_units_lemma(u: u64, v: u64, s: u64, t: u64, k: u32, l: u32) -> Result<bool> {
    if k == 0 || l == 0 {
        return Err(Error::Precondition(format!(
            "exponents must be at least 1, got k={k}, l={l}"
        )));
    }
    let pairs = [(u, v), (u, s), (u, t), (v, s), (v, t), (s, t)];
    for (a, b) in pairs {
        if a.gcd(&b) != 1 {
            return Err(Error::NotCoprime { a, b });
        }
    }
    // Exact in arbitrary precision; the summands can exceed u128 for large
    // exponents.
    let lhs = BigUint::from(u) * BigUint::from(s).pow(k) + BigUint::from(v) * BigUint::from(t).pow(l);
    let st = BigUint::from(s) * BigUint::from(t);
    Ok(lhs.gcd(&st) == BigUint::from(1u8))
}
