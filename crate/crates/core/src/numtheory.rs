//! Integer helpers for order finding: gcd, modular powers, multiplicative
//! orders and continued fractions.
//!
//! Moduli are capped below 2^32 so that products of two residues always fit
//! a `u64`; multiplications are checked anyway.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported modulus (exclusive).
pub const MODULUS_CAP: u64 = 1 << 32;

/// Default expansion length for [`continued_fraction`].
pub const DEFAULT_MAX_TERMS: usize = 64;

pub fn gcd(a: u64, b: u64) -> Result<u64> {
    if a == 0 && b == 0 {
        return Err(Error::Domain("gcd(0, 0) is undefined".into()));
    }
    let (mut a, mut b) = (a, b);
    while b != 0 {
        (a, b) = (b, a % b);
    }
    Ok(a)
}

pub(crate) fn gcd_nonzero(a: u64, b: u64) -> u64 {
    gcd(a, b).unwrap_or(0)
}

pub(crate) fn check_modulus(n: u64) -> Result<()> {
    if n < 2 {
        return Err(Error::Domain(format!("modulus {n} must be at least 2")));
    }
    if n >= MODULUS_CAP {
        return Err(Error::ModulusTooLarge(n));
    }
    Ok(())
}

#[inline]
pub(crate) fn mulmod(a: u64, b: u64, n: u64) -> u64 {
    a.checked_mul(b).expect("residues below 2^32") % n
}

/// `x^e mod n` by square-and-multiply.
pub fn modpow(x: u64, e: u64, n: u64) -> Result<u64> {
    check_modulus(n)?;
    let mut base = x % n;
    let mut e = e;
    let mut acc = 1;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, base, n);
        }
        base = mulmod(base, base, n);
        e >>= 1;
    }
    Ok(acc)
}

fn check_unit(x: u64, n: u64) -> Result<()> {
    check_modulus(n)?;
    if x <= 1 || x >= n {
        return Err(Error::Domain(format!("base {x} must satisfy 1 < x < {n}")));
    }
    if gcd_nonzero(x, n) != 1 {
        return Err(Error::NotCoprime(x, n));
    }
    Ok(())
}

/// Least `r > 0` with `x^r ≡ 1 (mod n)`, by direct iteration.
pub fn multiplicative_order(x: u64, n: u64) -> Result<u64> {
    check_unit(x, n)?;
    let mut acc = x;
    let mut r = 1;
    while acc != 1 {
        acc = mulmod(acc, x, n);
        r += 1;
    }
    Ok(r)
}

/// Shrink a verified multiple of the order down to the order itself by
/// dividing out prime factors while the power stays 1.
pub fn minimize_order(x: u64, multiple: u64, n: u64) -> Result<u64> {
    check_unit(x, n)?;
    if modpow(x, multiple, n)? != 1 {
        return Err(Error::Domain(format!("{x}^{multiple} is not 1 mod {n}")));
    }
    let mut r = multiple;
    for p in prime_factors(multiple) {
        while r % p == 0 && modpow(x, r / p, n)? == 1 {
            r /= p;
        }
    }
    Ok(r)
}

/// Distinct prime factors by trial division.
pub fn prime_factors(mut m: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            out.push(p);
            while m % p == 0 {
                m /= p;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if m > 1 {
        out.push(m);
    }
    out
}

pub fn is_prime(m: u64) -> bool {
    m >= 2 && prime_factors(m) == [m]
}

/// If `m = b^k` for some `k >= 2`, returns `(b, k)` with the largest such `k`.
pub fn perfect_power(m: u64) -> Option<(u64, u32)> {
    if m < 4 {
        return None;
    }
    for k in (2..=63u32).rev() {
        let guess = (m as f64).powf(1.0 / k as f64).round() as u64;
        for b in guess.saturating_sub(1).max(2)..=guess + 1 {
            if b.checked_pow(k) == Some(m) {
                return Some((b, k));
            }
        }
    }
    None
}

/// `m = p^k` with `p` prime and `k >= 1`.
pub fn is_prime_power(m: u64) -> bool {
    let f = prime_factors(m);
    f.len() == 1 && m >= 2
}

/// Regular continued fraction `[a0; a1, ...]` of a nonnegative rational,
/// with its convergents `b_k / c_k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContinuedFraction {
    pub coefficients: Vec<u64>,
    pub convergents: Vec<(u64, u64)>,
}

impl ContinuedFraction {
    pub fn denominators(&self) -> impl Iterator<Item = u64> + '_ {
        self.convergents.iter().map(|&(_, c)| c)
    }
}

pub fn continued_fraction(num: u64, den: u64, max_terms: usize) -> Result<ContinuedFraction> {
    if den == 0 {
        return Err(Error::Domain("continued fraction with zero denominator".into()));
    }
    let mut coefficients = Vec::new();
    let mut convergents = Vec::new();
    let (mut p, mut q) = (num, den);
    // (b_{k-1}, c_{k-1}) and (b_{k-2}, c_{k-2}), seeded with 1/0 and 0/1.
    let (mut b1, mut c1, mut b2, mut c2) = (1u128, 0u128, 0u128, 1u128);
    while coefficients.len() < max_terms.max(1) {
        let a = p / q;
        coefficients.push(a);
        let b = a as u128 * b1 + b2;
        let c = a as u128 * c1 + c2;
        convergents.push((u64::try_from(b).expect("bounded by num"), u64::try_from(c).expect("bounded by den")));
        (b2, c2, b1, c1) = (b1, c1, b, c);
        let r = p % q;
        if r == 0 {
            break;
        }
        (p, q) = (q, r);
    }
    Ok(ContinuedFraction { coefficients, convergents })
}

/// Order candidate from a phase measurement `omega / 2^t_bits`: the first
/// convergent denominator `c` in `(0, n)` with `x^c ≡ 1`.
pub fn extract_order(omega: u64, t_bits: u32, x: u64, n: u64) -> Result<Option<u64>> {
    check_modulus(n)?;
    if t_bits >= 64 || omega >= 1u64 << t_bits {
        return Err(Error::Domain(format!("measurement {omega} does not fit {t_bits} bits")));
    }
    if omega == 0 {
        return Ok(None);
    }
    let cf = continued_fraction(omega, 1u64 << t_bits, DEFAULT_MAX_TERMS)?;
    for c in cf.denominators() {
        if c > 0 && c < n && modpow(x, c, n)? == 1 {
            return Ok(Some(c));
        }
    }
    Ok(None)
}

/// Largest convergent denominator below `n` that approximates
/// `omega / 2^t_bits` within `2^-(t_bits+1)`; a divisor of the order when
/// the measurement landed near a peak `k/r` with `gcd(k, r) > 1`.
pub fn best_denominator(omega: u64, t_bits: u32, n: u64) -> Result<Option<u64>> {
    if omega == 0 {
        return Ok(None);
    }
    let den = 1u64 << t_bits;
    let cf = continued_fraction(omega, den, DEFAULT_MAX_TERMS)?;
    let mut best = None;
    for &(b, c) in &cf.convergents {
        if c == 0 || c >= n {
            break;
        }
        // |omega/den - b/c| <= 1/(2 den)  <=>  2 |omega c - b den| <= c
        let diff = (omega as i128 * c as i128 - b as i128 * den as i128).unsigned_abs();
        if 2 * diff <= c as u128 {
            best = Some(c);
        }
    }
    Ok(best)
}
