//! Truncated Laurent series over a finite field.
//!
//! A [`TSeries`] stores coefficients for exponents in the window
//! `[val, prec)`; everything at or beyond `prec` is unknown ("O(t^prec)").
//! Series are kept normalized: the first stored coefficient is nonzero, so
//! `val` is the certified valuation. Exact series (polynomials, monomials)
//! carry the sentinel precision [`EXACT_PREC`].
//!
//! Precision propagation is valuation-aware: multiplication yields
//! `min(prec_a + val_b, prec_b + val_a)`, composition `f(g)` yields
//! `min(prec_f * val_g, prec_g + (v* - 1) * val_g)` where `v*` is the
//! smallest nonzero exponent appearing in `f`.

use crate::error::{Error, Result};
use crate::ffield::{FFElem, FiniteField};
use std::fmt;
use std::sync::Arc;

/// Sentinel precision for series that are exactly known.
pub const EXACT_PREC: i64 = i64::MAX / 8;

fn cap(x: i64) -> i64 {
    // anything within shifting distance of the sentinel is still exact
    if x >= EXACT_PREC / 2 {
        EXACT_PREC
    } else {
        x
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct TSeries {
    field: Arc<FiniteField>,
    val: i64,
    prec: i64,
    /// Coefficient of `t^(val + i)` at index `i`; length `prec - val`
    /// (clamped so exact series only store up to their last nonzero term).
    coeffs: Vec<FFElem>,
}

impl fmt::Debug for TSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TSeries(val={}, prec=", self.val)?;
        if self.prec >= EXACT_PREC {
            write!(f, "exact")?;
        } else {
            write!(f, "{}", self.prec)?;
        }
        write!(f, ", [")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{:?}", c.coeffs())?;
        }
        write!(f, "])")
    }
}

impl TSeries {
    /// Normalizing constructor: trims leading zeros into `val` and clamps
    /// the stored window to `prec`.
    pub fn new(field: &Arc<FiniteField>, mut val: i64, prec: i64, mut coeffs: Vec<FFElem>) -> Self {
        // drop coefficients at or beyond prec
        if prec < EXACT_PREC {
            let keep = (prec - val).max(0) as usize;
            coeffs.truncate(keep);
        }
        // advance val past leading zeros
        let lead = coeffs.iter().position(|c| !c.is_zero());
        match lead {
            Some(k) => {
                val += k as i64;
                coeffs.drain(..k);
                // drop trailing zeros only for exact series (they carry no
                // information); for finite precision keep the full window
                if prec >= EXACT_PREC {
                    let last = coeffs.iter().rposition(|c| !c.is_zero()).unwrap();
                    coeffs.truncate(last + 1);
                }
            }
            None => {
                coeffs.clear();
                val = cap(prec);
            }
        }
        TSeries {
            field: field.clone(),
            val,
            prec: cap(prec),
            coeffs,
        }
    }

    pub fn zero(field: &Arc<FiniteField>, prec: i64) -> Self {
        Self::new(field, 0, prec, vec![])
    }

    /// Exact monomial `c * t^k`.
    pub fn monomial(field: &Arc<FiniteField>, c: FFElem, k: i64) -> Self {
        Self::new(field, k, EXACT_PREC, vec![c])
    }

    pub fn one(field: &Arc<FiniteField>) -> Self {
        Self::monomial(field, field.one(), 0)
    }

    /// Exact polynomial with the given coefficients starting at `t^val`.
    pub fn poly(field: &Arc<FiniteField>, val: i64, coeffs: Vec<FFElem>) -> Self {
        Self::new(field, val, EXACT_PREC, coeffs)
    }

    pub fn field(&self) -> &Arc<FiniteField> {
        &self.field
    }

    /// Certified valuation (equals `prec` for a series with no known
    /// nonzero coefficient).
    pub fn val(&self) -> i64 {
        self.val
    }

    pub fn prec(&self) -> i64 {
        self.prec
    }

    pub fn is_exact(&self) -> bool {
        self.prec >= EXACT_PREC
    }

    /// True when no nonzero coefficient is known.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of `t^k`; errors when `k` is beyond the precision.
    pub fn coeff(&self, k: i64) -> Result<FFElem> {
        if k >= self.prec {
            return Err(Error::PrecisionExhausted(Some(k.max(0) as usize)));
        }
        if k < self.val || (k - self.val) as usize >= self.coeffs.len() {
            return Ok(self.field.zero());
        }
        Ok(self.coeffs[(k - self.val) as usize].clone())
    }

    /// Iterator over the known (exponent, coefficient) pairs.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &FFElem)> {
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, c)| (self.val + i as i64, c))
    }

    fn check_field(&self, other: &TSeries) -> Result<()> {
        if *self.field != *other.field {
            return Err(Error::FieldMismatch);
        }
        Ok(())
    }

    /// Forget information beyond `t^prec`.
    pub fn truncate(&self, prec: i64) -> TSeries {
        Self::new(
            &self.field,
            self.val,
            self.prec.min(prec),
            self.coeffs.clone(),
        )
    }

    pub fn add(&self, other: &TSeries) -> Result<TSeries> {
        self.check_field(other)?;
        let prec = cap(self.prec.min(other.prec));
        // last known nonzero exponent across both operands; zero series
        // contribute nothing (their `val` is the sentinel)
        let mut maxe = i64::MIN;
        for s in [self, other] {
            if !s.coeffs.is_empty() {
                maxe = maxe.max(s.val + s.coeffs.len() as i64);
            }
        }
        if maxe == i64::MIN {
            return Ok(Self::zero(&self.field, prec));
        }
        let val = self.val.min(other.val).min(prec);
        let len = (prec.min(maxe) - val).max(0) as usize;
        let mut coeffs = vec![self.field.zero(); len];
        for (k, c) in self.terms() {
            if k < prec {
                coeffs[(k - val) as usize] = coeffs[(k - val) as usize].add(c);
            }
        }
        for (k, c) in other.terms() {
            if k < prec {
                coeffs[(k - val) as usize] = coeffs[(k - val) as usize].add(c);
            }
        }
        Ok(Self::new(&self.field, val, prec, coeffs))
    }

    pub fn neg(&self) -> TSeries {
        TSeries {
            field: self.field.clone(),
            val: self.val,
            prec: self.prec,
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
        }
    }

    pub fn sub(&self, other: &TSeries) -> Result<TSeries> {
        self.add(&other.neg())
    }

    pub fn scalar_mul(&self, c: &FFElem) -> TSeries {
        if c.is_zero() {
            return Self::zero(&self.field, self.prec);
        }
        TSeries {
            field: self.field.clone(),
            val: self.val,
            prec: self.prec,
            coeffs: self.coeffs.iter().map(|x| x.mul(c)).collect(),
        }
    }

    pub fn mul(&self, other: &TSeries) -> Result<TSeries> {
        self.check_field(other)?;
        let prec = cap(
            (self.prec.saturating_add(other.val)).min(other.prec.saturating_add(self.val)),
        );
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(&self.field, prec));
        }
        let val = self.val + other.val;
        let len = ((prec.min(
            val + self.coeffs.len() as i64 + other.coeffs.len() as i64 - 1,
        )) - val)
            .max(0) as usize;
        let mut coeffs = vec![self.field.zero(); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                if b.is_zero() {
                    continue;
                }
                coeffs[i + j] = coeffs[i + j].add(&a.mul(b));
            }
        }
        Ok(Self::new(&self.field, val, prec, coeffs))
    }

    /// Inverse of a series with known nonzero leading coefficient. The
    /// relative precision is preserved: the result is known modulo
    /// `t^(prec - 2 val)`.
    pub fn invert_unit(&self) -> Result<TSeries> {
        if self.is_zero() {
            return Err(Error::NotAUnit);
        }
        let rel = if self.is_exact() {
            EXACT_PREC
        } else {
            self.prec - self.val
        };
        let n = if rel >= EXACT_PREC {
            self.coeffs.len() as i64
        } else {
            rel
        } as usize;
        let a0inv = self.coeffs[0].inv()?;
        let mut out = vec![self.field.zero(); n];
        out[0] = a0inv.clone();
        for k in 1..n {
            // sum_{j=1..k} a_j * out_{k-j} with a_j the relative coeffs
            let mut s = self.field.zero();
            for j in 1..=k {
                let aj = if j < self.coeffs.len() {
                    &self.coeffs[j]
                } else {
                    continue;
                };
                if aj.is_zero() {
                    continue;
                }
                s = s.add(&aj.mul(&out[k - j]));
            }
            out[k] = s.mul(&a0inv).neg();
        }
        let prec = if self.is_exact() && self.coeffs.len() == 1 {
            EXACT_PREC
        } else if rel >= EXACT_PREC {
            // exact non-monomial: inverse is an honest infinite series; the
            // caller sees as much as we computed
            cap(-self.val + n as i64)
        } else {
            cap(-self.val + rel)
        };
        Ok(Self::new(&self.field, -self.val, prec, out))
    }

    pub fn pow_i(&self, n: i64) -> Result<TSeries> {
        if n == 0 {
            return Ok(Self::one(&self.field));
        }
        let base = if n < 0 { self.invert_unit()? } else { self.clone() };
        let mut n = n.unsigned_abs();
        let mut result: Option<TSeries> = None;
        let mut sq = base;
        loop {
            if n & 1 == 1 {
                result = Some(match result {
                    None => sq.clone(),
                    Some(r) => r.mul(&sq)?,
                });
            }
            n >>= 1;
            if n == 0 {
                break;
            }
            sq = sq.mul(&sq)?;
        }
        Ok(result.unwrap())
    }

    /// Substitution `f(g)` for `g` with valuation >= 1.
    pub fn compose(&self, g: &TSeries) -> Result<TSeries> {
        self.check_field(g)?;
        if g.val < 1 || g.is_zero() {
            return Err(Error::CompositionDiverges);
        }
        let vg = g.val;
        // smallest nonzero exponent of f (derivative bound)
        let vstar = self.terms().map(|(k, _)| k).find(|&k| k != 0);
        let tail = cap(self.prec.saturating_mul(vg));
        let prec = match vstar {
            None => tail,
            Some(v) => tail.min(cap(g.prec.saturating_add((v - 1).saturating_mul(vg)))),
        };
        if self.is_zero() {
            return Ok(Self::zero(&self.field, prec));
        }
        let mut h = g.pow_i(self.val)?.truncate(prec);
        let mut acc = Self::zero(&self.field, prec);
        let gt = g.truncate(prec);
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                acc = acc.add(&h.scalar_mul(c))?;
            }
            if i + 1 < self.coeffs.len() {
                h = h.mul(&gt)?.truncate(prec);
            }
        }
        Ok(acc.truncate(prec))
    }

    /// Substitution `t -> t^q` together with the coefficient map
    /// `x -> x^(q^steps)`. With `steps = 0` the coefficients are fixed
    /// (the relevant case when the coefficient field is the fixed field).
    pub fn frobenius_subst(&self, q: u64, steps: usize) -> TSeries {
        let qi = q as i64;
        let mut coeffs = vec![self.field.zero(); self.coeffs.len() * q as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            coeffs[i * q as usize] = if steps == 0 {
                c.clone()
            } else {
                c.frobenius_power(steps as i64, q)
            };
        }
        TSeries::new(
            &self.field,
            self.val.saturating_mul(qi),
            cap(self.prec.saturating_mul(qi)),
            coeffs,
        )
    }

    /// Coefficient-wise embedding into a larger coefficient field.
    pub fn embed_into(&self, target: &Arc<FiniteField>) -> Result<TSeries> {
        if *self.field == **target {
            return Ok(self.clone());
        }
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| crate::ffield::embed(c, target))
            .collect::<Result<Vec<_>>>()?;
        Ok(TSeries::new(target, self.val, self.prec, coeffs))
    }

    /// True when both series claim at least `k` digits and agree below
    /// `t^k`.
    pub fn eq_mod(&self, other: &TSeries, k: i64) -> bool {
        if self.prec < k || other.prec < k || *self.field != *other.field {
            return false;
        }
        match self.sub(other) {
            Ok(d) => d.val >= k,
            Err(_) => false,
        }
    }
}
