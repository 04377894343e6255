//! Precision-tracked arithmetic in `o_F / pi^K` for a finite extension
//! `F / Q_p` given by its residue degree and an Eisenstein polynomial.
//!
//! Elements are stored as polynomials in the uniformizer `pi` of degree
//! `< e`, with coefficients in the unramified ring `W = Z_{p^f} / p^k`.
//! `W` is modeled as `(Z/p^k)[x]` modulo the canonical irreducible
//! polynomial of degree `f`, lifted with coefficients in `{0,...,p-1}`.
//!
//! Each element carries a claimed pi-adic precision `prec` ("known modulo
//! pi^prec"). Multiplication uses the valuation-aware propagation rule
//! `prec = min(prec_a + val_b, prec_b + val_a)`; the only operation that
//! destroys precision is [`PiadicInteger::divide_by_pi_exact`].

use crate::error::{Error, Result};
use crate::ffield::{FFElem, FiniteField};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use std::fmt;
use std::sync::Arc;

/// Description of the local field `F`: prime, residue degree, ramification
/// index, and the Eisenstein polynomial of the uniformizer over the
/// unramified subfield.
#[derive(Debug)]
pub struct LocalFieldSpec {
    pub p: u64,
    pub f: usize,
    pub e: usize,
    /// Coefficients `c_0, ..., c_{e-1}` with `pi^e = -(c_{e-1} pi^{e-1} +
    /// ... + c_0)`; each as an integer coefficient vector over the
    /// unramified basis. For `e = 1` the convention is `pi = p` and the
    /// entry is informational.
    pub eis: Vec<Vec<i64>>,
    residue_field: Arc<FiniteField>,
    /// Lifted modulus of the unramified part (coefficients in {0,...,p-1}).
    lifted_modulus: Vec<BigInt>,
}

impl PartialEq for LocalFieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.f == other.f && self.e == other.e && self.eis == other.eis
    }
}
impl Eq for LocalFieldSpec {}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl LocalFieldSpec {
    /// Unramified spec `Q_{p^f}` with `pi = p`.
    pub fn unramified(p: u64, f: usize) -> Result<Arc<Self>> {
        Self::new(p, f, 1, None)
    }

    pub fn new(p: u64, f: usize, e: usize, eis: Option<Vec<Vec<i64>>>) -> Result<Arc<Self>> {
        if !is_prime(p) {
            return Err(Error::Invalid(format!("{p} is not prime")));
        }
        if f < 1 || e < 1 {
            return Err(Error::Invalid("f and e must be >= 1".into()));
        }
        let residue_field = FiniteField::get(p, f);
        let lifted_modulus: Vec<BigInt> = residue_field
            .modulus
            .iter()
            .map(|&c| BigInt::from(c))
            .collect();
        let eis = match eis {
            None => {
                if e != 1 {
                    return Err(Error::Invalid("eis required for ramified specs".into()));
                }
                vec![vec![p as i64]]
            }
            Some(v) => v,
        };
        if eis.len() != e {
            return Err(Error::Invalid(format!(
                "expected {e} Eisenstein coefficients, got {}",
                eis.len()
            )));
        }
        let spec = Arc::new(LocalFieldSpec {
            p,
            f,
            e,
            eis,
            residue_field,
            lifted_modulus,
        });
        // Eisenstein condition: v_p(c_0) = 1, v_p(c_i) >= 1 for i >= 1
        for (i, c) in spec.eis.iter().enumerate() {
            if c.len() > f {
                return Err(Error::Invalid("Eisenstein coefficient too wide".into()));
            }
            let v = c
                .iter()
                .map(|&x| int_val_p(x, p))
                .min()
                .unwrap_or(i64::MAX);
            if i == 0 && v != 1 {
                return Err(Error::Invalid(
                    "constant Eisenstein coefficient must have p-valuation exactly 1".into(),
                ));
            }
            if i > 0 && v < 1 {
                return Err(Error::Invalid(
                    "higher Eisenstein coefficients must have positive valuation".into(),
                ));
            }
        }
        Ok(spec)
    }

    pub fn q(&self) -> u64 {
        self.p.pow(self.f as u32)
    }

    pub fn residue_field(&self) -> &Arc<FiniteField> {
        &self.residue_field
    }

    /// Stable identifier used for cache keys.
    pub fn fingerprint(&self) -> String {
        format!("p{}f{}e{}eis{:?}", self.p, self.f, self.e, self.eis)
    }

    fn pk(&self, pprec: u32) -> BigInt {
        BigInt::from(self.p).pow(pprec)
    }

    fn w_from_ints(&self, v: &[i64], pk: &BigInt) -> Vec<BigInt> {
        let mut c: Vec<BigInt> = v.iter().map(|&x| BigInt::from(x).mod_floor(pk)).collect();
        c.resize(self.f, BigInt::zero());
        c
    }

    fn w_zero(&self) -> Vec<BigInt> {
        vec![BigInt::zero(); self.f]
    }

    fn w_add(&self, a: &[BigInt], b: &[BigInt], pk: &BigInt) -> Vec<BigInt> {
        a.iter().zip(b).map(|(x, y)| (x + y).mod_floor(pk)).collect()
    }

    fn w_sub(&self, a: &[BigInt], b: &[BigInt], pk: &BigInt) -> Vec<BigInt> {
        a.iter().zip(b).map(|(x, y)| (x - y).mod_floor(pk)).collect()
    }

    fn w_neg(&self, a: &[BigInt], pk: &BigInt) -> Vec<BigInt> {
        a.iter().map(|x| (-x).mod_floor(pk)).collect()
    }

    fn w_mul(&self, a: &[BigInt], b: &[BigInt], pk: &BigInt) -> Vec<BigInt> {
        let f = self.f;
        let mut prod = vec![BigInt::zero(); 2 * f - 1];
        for i in 0..f {
            if a[i].is_zero() {
                continue;
            }
            for j in 0..f {
                if b[j].is_zero() {
                    continue;
                }
                prod[i + j] += &a[i] * &b[j];
            }
        }
        // reduce modulo the lifted modulus (monic of degree f)
        for deg in (f..2 * f - 1).rev() {
            if prod[deg].is_zero() {
                continue;
            }
            let lead = prod[deg].clone();
            for (i, g) in self.lifted_modulus.iter().enumerate().take(f) {
                prod[deg - f + i] -= &lead * g;
            }
            prod[deg] = BigInt::zero();
        }
        prod.truncate(f);
        prod.iter().map(|x| x.mod_floor(pk)).collect()
    }

    fn w_is_zero_mod_p(&self, a: &[BigInt]) -> bool {
        let p = BigInt::from(self.p);
        a.iter().all(|x| x.mod_floor(&p).is_zero())
    }

    fn w_div_p(&self, a: &[BigInt]) -> Vec<BigInt> {
        let p = BigInt::from(self.p);
        a.iter().map(|x| x / &p).collect()
    }
}

fn int_val_p(x: i64, p: u64) -> i64 {
    if x == 0 {
        return i64::MAX;
    }
    let mut v = 0;
    let mut x = x.unsigned_abs();
    while x % p == 0 {
        x /= p;
        v += 1;
    }
    v
}

/// An element of `o_F` known modulo `pi^prec`.
#[derive(Clone)]
pub struct PiadicInteger {
    spec: Arc<LocalFieldSpec>,
    /// `e` coefficients in `W`, each a vector of `f` residues mod `p^pprec`.
    coeffs: Vec<Vec<BigInt>>,
    pprec: u32,
    prec: i64,
}

impl fmt::Debug for PiadicInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Piadic({:?} mod pi^{})", self.coeffs, self.prec)
    }
}

fn pprec_for(prec: i64, _e: usize) -> u32 {
    // one p-digit per claimed pi-digit plus slack: each division by pi is
    // booked conservatively as a full p-digit of loss, even when e > 1
    (prec.max(0) as u32) + 1
}

impl PiadicInteger {
    pub fn spec(&self) -> &Arc<LocalFieldSpec> {
        &self.spec
    }

    pub fn prec(&self) -> i64 {
        self.prec
    }

    pub fn zero(spec: &Arc<LocalFieldSpec>, prec: i64) -> Self {
        let pprec = pprec_for(prec, spec.e);
        PiadicInteger {
            spec: spec.clone(),
            coeffs: vec![spec.w_zero(); spec.e],
            pprec,
            prec,
        }
    }

    pub fn from_int(spec: &Arc<LocalFieldSpec>, v: i64, prec: i64) -> Self {
        let mut r = Self::zero(spec, prec);
        let pk = spec.pk(r.pprec);
        r.coeffs[0] = spec.w_from_ints(&[v], &pk);
        r
    }

    /// Element from an integer coefficient vector over the unramified basis.
    pub fn from_w_ints(spec: &Arc<LocalFieldSpec>, v: &[i64], prec: i64) -> Self {
        let mut r = Self::zero(spec, prec);
        let pk = spec.pk(r.pprec);
        r.coeffs[0] = spec.w_from_ints(v, &pk);
        r
    }

    /// The uniformizer at the given precision.
    pub fn pi(spec: &Arc<LocalFieldSpec>, prec: i64) -> Self {
        let mut r = Self::zero(spec, prec);
        let pk = spec.pk(r.pprec);
        if spec.e == 1 {
            r.coeffs[0] = spec.w_from_ints(&[spec.p as i64], &pk);
        } else {
            r.coeffs[1] = spec.w_from_ints(&[1], &pk);
        }
        r
    }

    fn check_spec(&self, other: &PiadicInteger) -> Result<()> {
        if *self.spec != *other.spec {
            return Err(Error::SpecMismatch);
        }
        Ok(())
    }

    fn reduced_to(&self, pprec: u32) -> Vec<Vec<BigInt>> {
        if pprec == self.pprec {
            return self.coeffs.clone();
        }
        let pk = self.spec.pk(pprec);
        self.coeffs
            .iter()
            .map(|w| w.iter().map(|x| x.mod_floor(&pk)).collect())
            .collect()
    }

    pub fn add(&self, other: &PiadicInteger) -> Result<PiadicInteger> {
        self.check_spec(other)?;
        let pprec = self.pprec.min(other.pprec);
        let prec = self.prec.min(other.prec);
        let pk = self.spec.pk(pprec);
        let (a, b) = (self.reduced_to(pprec), other.reduced_to(pprec));
        let coeffs = a
            .iter()
            .zip(&b)
            .map(|(x, y)| self.spec.w_add(x, y, &pk))
            .collect();
        Ok(PiadicInteger {
            spec: self.spec.clone(),
            coeffs,
            pprec,
            prec,
        })
    }

    pub fn sub(&self, other: &PiadicInteger) -> Result<PiadicInteger> {
        self.check_spec(other)?;
        let pprec = self.pprec.min(other.pprec);
        let prec = self.prec.min(other.prec);
        let pk = self.spec.pk(pprec);
        let (a, b) = (self.reduced_to(pprec), other.reduced_to(pprec));
        let coeffs = a
            .iter()
            .zip(&b)
            .map(|(x, y)| self.spec.w_sub(x, y, &pk))
            .collect();
        Ok(PiadicInteger {
            spec: self.spec.clone(),
            coeffs,
            pprec,
            prec,
        })
    }

    pub fn neg(&self) -> PiadicInteger {
        let pk = self.spec.pk(self.pprec);
        let coeffs = self
            .coeffs
            .iter()
            .map(|x| self.spec.w_neg(x, &pk))
            .collect();
        PiadicInteger {
            spec: self.spec.clone(),
            coeffs,
            pprec: self.pprec,
            prec: self.prec,
        }
    }

    pub fn mul(&self, other: &PiadicInteger) -> Result<PiadicInteger> {
        self.check_spec(other)?;
        let spec = &self.spec;
        let e = spec.e;
        // W-digit precision is valuation-aware as well: multiplying a
        // representative known mod p^k by a p^v-divisible factor yields a
        // product known mod p^(k+v). Representatives are multiplied
        // unreduced and only the result is reduced.
        let pprec = (self.pprec + other.w_val_p())
            .min(other.pprec + self.w_val_p())
            .min(self.pprec + other.pprec);
        let pk = spec.pk(pprec);
        let (a, b) = (&self.coeffs, &other.coeffs);
        let mut prod = vec![spec.w_zero(); 2 * e - 1];
        for i in 0..e {
            for j in 0..e {
                let t = spec.w_mul(&a[i], &b[j], &pk);
                prod[i + j] = spec.w_add(&prod[i + j], &t, &pk);
            }
        }
        // fold degrees >= e with pi^e = -(c_{e-1} pi^{e-1} + ... + c_0)
        for deg in (e..2 * e - 1).rev() {
            if prod[deg].iter().all(|x| x.is_zero()) {
                continue;
            }
            let lead = prod[deg].clone();
            for (i, c) in spec.eis.iter().enumerate() {
                let ci = spec.w_from_ints(c, &pk);
                let t = spec.w_mul(&lead, &ci, &pk);
                prod[deg - e + i] = spec.w_sub(&prod[deg - e + i], &t, &pk);
            }
            prod[deg] = spec.w_zero();
        }
        prod.truncate(e);
        // valuation-aware precision propagation
        let cap = (e as i64) * pprec as i64;
        let va = self.valuation();
        let vb = other.valuation();
        let prec = (self.prec + vb).min(other.prec + va).min(cap);
        Ok(PiadicInteger {
            spec: spec.clone(),
            coeffs: prod,
            pprec,
            prec,
        })
    }

    /// Minimum p-valuation across all W-coordinates of the representative,
    /// capped at `pprec`.
    fn w_val_p(&self) -> u32 {
        let p = BigInt::from(self.spec.p);
        let mut best = self.pprec;
        for w in &self.coeffs {
            for x in w {
                let mut vx = 0u32;
                let mut x = x.clone();
                while vx < best && !x.is_zero() {
                    let (q, r) = x.div_mod_floor(&p);
                    if !r.is_zero() {
                        break;
                    }
                    x = q;
                    vx += 1;
                }
                if !x.is_zero() {
                    best = best.min(vx);
                }
                if best == 0 {
                    return 0;
                }
            }
        }
        best
    }

    /// Pi-adic valuation of the stored representative, capped at the
    /// claimed precision.
    ///
    /// Uses the exact identity `v(sum a_i pi^i) = min_i (i + e v_p(a_i))`,
    /// which holds for any Eisenstein polynomial because the terms have
    /// pairwise distinct valuations modulo `e`.
    pub fn valuation(&self) -> i64 {
        let e = self.spec.e as i64;
        let p = BigInt::from(self.spec.p);
        let mut best = i64::MAX;
        for (i, w) in self.coeffs.iter().enumerate() {
            let mut va = self.pprec as i64;
            for x in w {
                let mut vx = 0i64;
                let mut x = x.clone();
                while vx < va && !x.is_zero() {
                    let (q, r) = x.div_mod_floor(&p);
                    if !r.is_zero() {
                        break;
                    }
                    x = q;
                    vx += 1;
                }
                if x.is_zero() {
                    vx = self.pprec as i64;
                }
                va = va.min(vx);
            }
            if va < self.pprec as i64 {
                best = best.min(i as i64 + e * va);
            }
        }
        best.min(self.prec)
    }

    /// Divide the representative by pi without precision bookkeeping.
    /// Requires the first pi-coefficient to be divisible by p.
    fn raw_div_pi(&self) -> Option<PiadicInteger> {
        let spec = &self.spec;
        if self.pprec <= 1 {
            return None;
        }
        if !spec.w_is_zero_mod_p(&self.coeffs[0]) {
            return None;
        }
        let pprec = self.pprec - 1;
        let pk = spec.pk(pprec);
        let b = spec.w_div_p(&self.coeffs[0]);
        let e = spec.e;
        let mut out = vec![spec.w_zero(); e];
        if e == 1 {
            out[0] = b.iter().map(|x| x.mod_floor(&pk)).collect();
        } else {
            for i in 1..e {
                out[i - 1] = self.coeffs[i].iter().map(|x| x.mod_floor(&pk)).collect();
            }
            // p = pi * rho with rho = -u0^{-1} (pi^{e-1} + c_{e-1} pi^{e-2}
            // + ... + c_1), u0 = c_0 / p
            let u0: Vec<i64> = {
                let p = spec.p as i64;
                let mut v = spec.eis[0].clone();
                for x in v.iter_mut() {
                    *x /= p;
                }
                v
            };
            let u0w = spec.w_from_ints(&u0, &pk);
            let u0inv = w_invert(spec, &u0w, pprec)?;
            let bw: Vec<BigInt> = b.iter().map(|x| x.mod_floor(&pk)).collect();
            let scale = spec.w_mul(&bw, &u0inv, &pk);
            for i in 0..e - 1 {
                let ci = spec.w_from_ints(&spec.eis[i + 1], &pk);
                let t = spec.w_mul(&scale, &ci, &pk);
                out[i] = spec.w_sub(&out[i], &t, &pk);
            }
            out[e - 1] = spec.w_sub(&out[e - 1], &scale, &pk);
        }
        Some(PiadicInteger {
            spec: spec.clone(),
            coeffs: out,
            pprec,
            prec: (self.prec - 1).max(0),
        })
    }

    /// Exact division by the uniformizer; loses one digit of precision.
    pub fn divide_by_pi_exact(&self) -> Result<PiadicInteger> {
        if self.prec < 1 {
            return Err(Error::PrecisionExhausted(None));
        }
        if !self.spec.w_is_zero_mod_p(&self.coeffs[0]) {
            return Err(Error::NotDivisible);
        }
        let mut r = self
            .raw_div_pi()
            .ok_or(Error::PrecisionExhausted(None))?;
        let cap = (self.spec.e as i64) * r.pprec as i64;
        r.prec = (self.prec - 1).min(cap);
        Ok(r)
    }

    /// Reduction modulo pi onto the residue field.
    pub fn residue(&self) -> Result<FFElem> {
        if self.prec < 1 {
            return Err(Error::PrecisionExhausted(None));
        }
        let p = BigInt::from(self.spec.p);
        let coeffs: Vec<u64> = self.coeffs[0]
            .iter()
            .map(|x| {
                let r = x.mod_floor(&p);
                r.abs().to_u64_digits().1.first().copied().unwrap_or(0)
            })
            .collect();
        Ok(self.spec.residue_field.elem(&coeffs))
    }

    /// The Teichmueller lift of a residue-field element: the unique root of
    /// `x^q = x` above it, computed by iterating `x -> x^q`.
    pub fn teichmuller(spec: &Arc<LocalFieldSpec>, a: &FFElem, prec: i64) -> Self {
        assert_eq!(*a.field, **spec.residue_field(), "residue field mismatch");
        let prec = prec.max(1);
        let pprec = pprec_for(prec, spec.e);
        let pk = spec.pk(pprec);
        let ints: Vec<i64> = a.coeffs().iter().map(|&x| x as i64).collect();
        let mut x = spec.w_from_ints(&ints, &pk);
        let q = spec.q();
        for _ in 0..(pprec + 1) {
            let next = w_pow(spec, &x, q as u128, &pk);
            if next == x {
                break;
            }
            x = next;
        }
        let mut coeffs = vec![spec.w_zero(); spec.e];
        coeffs[0] = x;
        PiadicInteger {
            spec: spec.clone(),
            coeffs,
            pprec,
            prec,
        }
    }

    /// Element from a pi-adic Teichmueller digit expansion.
    pub fn from_digits(spec: &Arc<LocalFieldSpec>, digits: &[FFElem], prec: i64) -> Result<Self> {
        let mut acc = Self::zero(spec, prec);
        let pi = Self::pi(spec, prec);
        let mut pipow = Self::from_int(spec, 1, prec);
        for d in digits {
            if !d.is_zero() {
                let t = Self::teichmuller(spec, d, prec).mul(&pipow)?;
                acc = acc.add(&t)?;
            }
            pipow = pipow.mul(&pi)?;
        }
        Ok(acc)
    }

    /// Teichmueller digit expansion of the first `k` digits.
    pub fn digits(&self, k: i64) -> Result<Vec<FFElem>> {
        if k > self.prec {
            return Err(Error::PrecisionExhausted(None));
        }
        let mut out = vec![];
        let mut cur = self.clone();
        for _ in 0..k {
            let d = cur.residue()?;
            if !d.is_zero() {
                let t = Self::teichmuller(&self.spec, &d, cur.prec);
                cur = cur.sub(&t)?;
            }
            cur = cur.divide_by_pi_exact()?;
            out.push(d);
        }
        Ok(out)
    }

    /// Inverse of a unit by Newton iteration.
    pub fn invert_unit(&self) -> Result<PiadicInteger> {
        let r0 = self.residue()?;
        if r0.is_zero() {
            return Err(Error::NotAUnit);
        }
        let inv0 = r0.inv()?;
        let ints: Vec<i64> = inv0.coeffs().iter().map(|&x| x as i64).collect();
        let mut y = Self::from_w_ints(&self.spec, &ints, self.prec);
        let two = Self::from_int(&self.spec, 2, self.prec);
        let iters = 64 - (self.prec.max(1) as u64).leading_zeros() + 2;
        for _ in 0..iters {
            let t = two.sub(&self.mul(&y)?)?;
            let next = y.mul(&t)?;
            if next.coeffs == y.coeffs {
                break;
            }
            y = next;
        }
        Ok(y)
    }

    pub fn pow_u(&self, mut n: u64) -> Result<PiadicInteger> {
        let mut result = Self::from_int(&self.spec, 1, self.prec);
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                result = result.mul(&base)?;
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(result)
    }

    /// True when the two elements agree modulo `pi^k` (both must claim at
    /// least `k` digits).
    pub fn eq_mod(&self, other: &PiadicInteger, k: i64) -> bool {
        match self.sub(other) {
            Ok(d) => d.prec >= k && d.valuation() >= k,
            Err(_) => false,
        }
    }

    pub fn is_zero_mod(&self, k: i64) -> bool {
        self.prec >= k && self.valuation() >= k
    }
}

fn w_pow(spec: &LocalFieldSpec, a: &[BigInt], mut n: u128, pk: &BigInt) -> Vec<BigInt> {
    let mut result = spec.w_from_ints(&[1], pk);
    let mut base = a.to_vec();
    while n > 0 {
        if n & 1 == 1 {
            result = spec.w_mul(&result, &base, pk);
        }
        n >>= 1;
        if n > 0 {
            base = spec.w_mul(&base, &base, pk);
        }
    }
    result
}

fn w_invert(spec: &LocalFieldSpec, a: &[BigInt], pprec: u32) -> Option<Vec<BigInt>> {
    let pk = spec.pk(pprec);
    let p = BigInt::from(spec.p);
    // residue inverse as the seed
    let res: Vec<u64> = a
        .iter()
        .map(|x| x.mod_floor(&p).abs().to_u64_digits().1.first().copied().unwrap_or(0))
        .collect();
    let r0 = spec.residue_field().elem(&res);
    let inv0 = r0.inv().ok()?;
    let ints: Vec<i64> = inv0.coeffs().iter().map(|&x| x as i64).collect();
    let mut y = spec.w_from_ints(&ints, &pk);
    let two = spec.w_from_ints(&[2], &pk);
    for _ in 0..(35 - (pprec.max(1)).leading_zeros()) {
        let xy = spec.w_mul(a, &y, &pk);
        let t = spec.w_sub(&two, &xy, &pk);
        let next = spec.w_mul(&y, &t, &pk);
        if next == y {
            break;
        }
        y = next;
    }
    Some(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q2() -> Arc<LocalFieldSpec> {
        LocalFieldSpec::unramified(2, 1).unwrap()
    }

    fn q3() -> Arc<LocalFieldSpec> {
        LocalFieldSpec::unramified(3, 1).unwrap()
    }

    fn q2_ram() -> Arc<LocalFieldSpec> {
        // pi^2 = 2 over Q_2: pi^2 = -c_0 with c_0 = -2
        LocalFieldSpec::new(2, 1, 2, Some(vec![vec![-2], vec![0]])).unwrap()
    }

    #[test]
    fn basic_ring_ops() {
        let s = q2();
        let a = PiadicInteger::from_int(&s, 3, 10);
        let b = PiadicInteger::from_int(&s, 5, 10);
        let c = a.add(&b).unwrap();
        assert!(c.eq_mod(&PiadicInteger::from_int(&s, 8, 10), 10));
        let z = a.mul(&PiadicInteger::zero(&s, 4)).unwrap();
        assert!(z.is_zero_mod(4));
        assert_eq!(z.prec(), 4 + a.valuation());
    }

    #[test]
    fn spec_mismatch_rejected() {
        let a = PiadicInteger::from_int(&q2(), 1, 4);
        let b = PiadicInteger::from_int(&q3(), 1, 4);
        assert_eq!(a.add(&b).unwrap_err(), Error::SpecMismatch);
    }

    #[test]
    fn eisenstein_relation_pi_squared() {
        let s = q2_ram();
        let pi = PiadicInteger::pi(&s, 10);
        let two = PiadicInteger::from_int(&s, 2, 10);
        let sq = pi.mul(&pi).unwrap();
        assert!(sq.eq_mod(&two, 8));
    }

    #[test]
    fn eisenstein_relation_general() {
        // pi^3 = -(3 pi + 6) over Q_3 (Eisenstein: v(6)=1, v(3)=1)
        let s = LocalFieldSpec::new(3, 1, 3, Some(vec![vec![6], vec![3], vec![0]])).unwrap();
        let pi = PiadicInteger::pi(&s, 12);
        let lhs = pi.pow_u(3).unwrap();
        let rhs = pi
            .mul(&PiadicInteger::from_int(&s, 3, 12))
            .unwrap()
            .add(&PiadicInteger::from_int(&s, 6, 12))
            .unwrap()
            .neg();
        assert!(lhs.eq_mod(&rhs, 10));
    }

    #[test]
    fn divide_by_pi_cases() {
        let s = q3();
        let six = PiadicInteger::from_int(&s, 6, 5);
        let r = six.divide_by_pi_exact().unwrap();
        assert_eq!(r.prec(), 4);
        assert!(r.eq_mod(&PiadicInteger::from_int(&s, 2, 4), 4));

        let one = PiadicInteger::from_int(&q2(), 1, 5);
        assert_eq!(one.divide_by_pi_exact().unwrap_err(), Error::NotDivisible);

        // ramified: 2 / pi = pi
        let s = q2_ram();
        let two = PiadicInteger::from_int(&s, 2, 8);
        let r = two.divide_by_pi_exact().unwrap();
        assert_eq!(r.prec(), 7);
        assert!(r.eq_mod(&PiadicInteger::pi(&s, 7), 7));
        // round trip: (x * pi) / pi = x with one digit of bookkeeping lost
        let x = PiadicInteger::from_int(&s, 5, 8);
        let rt = x
            .mul(&PiadicInteger::pi(&s, 8))
            .unwrap()
            .divide_by_pi_exact()
            .unwrap();
        assert!(rt.eq_mod(&x, 7));
    }

    #[test]
    fn precision_zero_poisons() {
        let s = q2();
        let two = PiadicInteger::from_int(&s, 2, 1);
        let r = two.divide_by_pi_exact().unwrap();
        assert_eq!(r.prec(), 0);
        assert_eq!(r.residue().unwrap_err(), Error::PrecisionExhausted(None));
        assert_eq!(
            r.divide_by_pi_exact().unwrap_err(),
            Error::PrecisionExhausted(None)
        );
    }

    #[test]
    fn residue_map() {
        let s = q2();
        assert_eq!(
            PiadicInteger::from_int(&s, 3, 4).residue().unwrap(),
            s.residue_field().one()
        );
        let s = q3();
        assert_eq!(
            PiadicInteger::from_int(&s, 5, 4).residue().unwrap(),
            s.residue_field().from_int(2)
        );
        // section property over F_4
        let s = LocalFieldSpec::unramified(2, 2).unwrap();
        for idx in 0..4u128 {
            let a = s.residue_field().elem_at(idx);
            let t = PiadicInteger::teichmuller(&s, &a, 6);
            assert_eq!(t.residue().unwrap(), a);
        }
    }

    #[test]
    fn teichmuller_is_root_of_unity() {
        // Q_3: tau(2) = -1
        let s = q3();
        let t = PiadicInteger::teichmuller(&s, &s.residue_field().from_int(2), 8);
        assert!(t.eq_mod(&PiadicInteger::from_int(&s, -1, 8), 8));
        // Q_5: tau(2)^4 = 1, tau(2) = 2 mod 5
        let s = LocalFieldSpec::unramified(5, 1).unwrap();
        let t = PiadicInteger::teichmuller(&s, &s.residue_field().from_int(2), 8);
        assert!(t.pow_u(4).unwrap().eq_mod(&PiadicInteger::from_int(&s, 1, 8), 8));
        assert_eq!(t.residue().unwrap(), s.residue_field().from_int(2));
        // idempotents
        let z = PiadicInteger::teichmuller(&s, &s.residue_field().zero(), 8);
        assert!(z.is_zero_mod(8));
        let o = PiadicInteger::teichmuller(&s, &s.residue_field().one(), 8);
        assert!(o.eq_mod(&PiadicInteger::from_int(&s, 1, 8), 8));
    }

    #[test]
    fn teichmuller_multiplicative() {
        let s = LocalFieldSpec::unramified(3, 2).unwrap();
        let k = s.residue_field().clone();
        for i in 1..9u128 {
            for j in 1..9u128 {
                let (a, b) = (k.elem_at(i), k.elem_at(j));
                let lhs = PiadicInteger::teichmuller(&s, &a.mul(&b), 6);
                let rhs = PiadicInteger::teichmuller(&s, &a, 6)
                    .mul(&PiadicInteger::teichmuller(&s, &b, 6))
                    .unwrap();
                assert!(lhs.eq_mod(&rhs, 6));
            }
        }
    }

    #[test]
    fn unit_inversion() {
        for s in [q2(), q3(), q2_ram()] {
            let u = PiadicInteger::from_int(&s, 1, 12)
                .add(&PiadicInteger::pi(&s, 12))
                .unwrap();
            let inv = u.invert_unit().unwrap();
            let one = PiadicInteger::from_int(&s, 1, 12);
            assert!(u.mul(&inv).unwrap().eq_mod(&one, 12));
        }
    }

    #[test]
    fn residue_is_multiplicative() {
        let s = LocalFieldSpec::unramified(2, 2).unwrap();
        for i in 1..4u128 {
            for j in 1..4u128 {
                let a = PiadicInteger::teichmuller(&s, &s.residue_field().elem_at(i), 6)
                    .add(&PiadicInteger::pi(&s, 6))
                    .unwrap();
                let b = PiadicInteger::teichmuller(&s, &s.residue_field().elem_at(j), 6);
                let lhs = a.mul(&b).unwrap().residue().unwrap();
                let rhs = a.residue().unwrap().mul(&b.residue().unwrap());
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn digits_roundtrip() {
        let s = q3();
        let x = PiadicInteger::from_int(&s, 22, 6);
        let d = x.digits(5).unwrap();
        let y = PiadicInteger::from_digits(&s, &d, 6).unwrap();
        assert!(x.eq_mod(&y, 5));
    }
}
