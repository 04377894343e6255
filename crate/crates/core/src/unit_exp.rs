//! Z_p-exponentiation of 1-units in `k((t))`.
//!
//! For a 1-unit `f = 1 + O(t)` and an exponent `a = num/den` with `p` not
//! dividing `den`, the power `f^a` is defined through the p-adic digit
//! expansion of `a`: `f^a = prod_i (f^(p^i))^(d_i)`. In characteristic `p`
//! the building blocks `f^(p^i)` are exact coefficient-wise Frobenius
//! substitutions, and the factor for digit `i` is `1 + O(t^(p^i))`, so the
//! product stabilizes after `O(log_p N)` factors.

use crate::error::{Error, Result};
use crate::series::TSeries;

/// An exponent in `Z_p cap Q`, as a fraction with denominator prime to p.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PExponent {
    pub num: i64,
    pub den: u64,
}

impl PExponent {
    pub fn new(num: i64, den: u64) -> Self {
        assert!(den > 0, "denominator must be positive");
        let g = gcd(num.unsigned_abs(), den);
        PExponent {
            num: num / g as i64,
            den: den / g,
        }
    }

    pub fn integer(n: i64) -> Self {
        PExponent { num: n, den: 1 }
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 { a.max(1) } else { gcd(b, a % b) }
}

/// First `count` digits of the p-adic expansion of `num/den`
/// (digit `i` is the coefficient of `p^i`).
pub fn padic_digits(exp: &PExponent, p: u64, count: usize) -> Result<Vec<u64>> {
    if exp.den % p == 0 {
        return Err(Error::DenominatorDivisibleByP);
    }
    let p = p as i128;
    let den = exp.den as i128;
    let den_inv = mod_inv(den.rem_euclid(p), p);
    let mut a = exp.num as i128;
    let mut digits = Vec::with_capacity(count);
    for _ in 0..count {
        let d = (a.rem_euclid(p) * den_inv).rem_euclid(p);
        digits.push(d as u64);
        a = (a - d * den) / p;
    }
    Ok(digits)
}

fn mod_inv(a: i128, p: i128) -> i128 {
    // Fermat inverse; p is prime and a is nonzero mod p
    let mut r: i128 = 1;
    let mut base = a.rem_euclid(p);
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    r
}

/// `f^exp` modulo `t^n` for a 1-unit `f`.
pub fn one_unit_pow(f: &TSeries, exp: &PExponent, n: i64) -> Result<TSeries> {
    let field = f.field().clone();
    let p = field.p;
    if f.val() != 0 || f.coeff(0)? != field.one() {
        return Err(Error::NotAOneUnit);
    }
    if f.prec() < n {
        return Err(Error::PrecisionExhausted(None));
    }
    // valuation of f - 1 controls how fast the digit factors converge
    let one = TSeries::one(&field);
    let v = f.sub(&one)?.val().max(1);
    let mut count = 0usize;
    let mut reach = v;
    while reach < n {
        reach = reach.saturating_mul(p as i64);
        count += 1;
    }
    count += 1;
    let digits = padic_digits(exp, p, count)?;
    let mut acc = TSeries::one(&field).truncate(n);
    let mut block = f.truncate(n);
    for (i, &d) in digits.iter().enumerate() {
        if d > 0 {
            for _ in 0..d {
                acc = acc.mul(&block)?.truncate(n);
            }
        }
        if i + 1 < digits.len() {
            // f^(p^(i+1)) by the Frobenius substitution t -> t^p, c -> c^p
            block = block.frobenius_subst(p, 1).truncate(n);
        }
    }
    Ok(acc.truncate(n))
}
