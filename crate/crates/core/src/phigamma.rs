//! The explicit (phi,Gamma)-module matrices for the induced, character and
//! twisted constructions, semilinear application of phi and gamma, and the
//! verification identities (commutation, cocycle, determinant).
//!
//! Conventions: a module of rank `n` acts on coordinate vectors. Applying
//! phi maps `v` to `Phi . sigma(v)` where `sigma` substitutes `t -> t^q`
//! with fixed coefficients; applying `gamma_u` maps `v` to
//! `Gamma(u) . (v o [u](t))`. Gamma-matrices are generated on demand per
//! unit and memoized.

use crate::error::{Error, Result};
use crate::ffield::{embed, FFElem, FiniteField};
use crate::lubin_tate::{fbar, gamma_series, PhiSpec, UnitValue};
use crate::padic::LocalFieldSpec;
use crate::report::Report;
use crate::reps::is_q_primitive;
use crate::series::TSeries;
use crate::unit_exp::{one_unit_pow, PExponent};
use serde_json::json;
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

// ---------------------------------------------------------------------------
// matrices of truncated Laurent series
// ---------------------------------------------------------------------------

/// A square matrix of `TSeries` over a common coefficient field.
#[derive(Debug, Clone)]
pub struct Mat {
    pub field: Arc<FiniteField>,
    pub n: usize,
    /// Row-major entries.
    pub rows: Vec<Vec<TSeries>>,
}

impl Mat {
    pub fn new(field: &Arc<FiniteField>, rows: Vec<Vec<TSeries>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch);
        }
        Ok(Mat {
            field: field.clone(),
            n,
            rows,
        })
    }

    pub fn identity(field: &Arc<FiniteField>, n: usize) -> Self {
        let zero = TSeries::zero(field, crate::series::EXACT_PREC);
        let mut rows = vec![vec![zero; n]; n];
        for (i, row) in rows.iter_mut().enumerate() {
            row[i] = TSeries::one(field);
        }
        Mat {
            field: field.clone(),
            n,
            rows,
        }
    }

    pub fn mul(&self, other: &Mat) -> Result<Mat> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch);
        }
        let mut rows = Vec::with_capacity(self.n);
        for i in 0..self.n {
            let mut row = Vec::with_capacity(self.n);
            for j in 0..self.n {
                let mut acc = TSeries::zero(&self.field, crate::series::EXACT_PREC);
                for k in 0..self.n {
                    acc = acc.add(&self.rows[i][k].mul(&other.rows[k][j])?)?;
                }
                row.push(acc);
            }
            rows.push(row);
        }
        Mat::new(&self.field, rows)
    }

    pub fn mul_vec(&self, v: &[TSeries]) -> Result<Vec<TSeries>> {
        if v.len() != self.n {
            return Err(Error::DimensionMismatch);
        }
        let mut out = Vec::with_capacity(self.n);
        for i in 0..self.n {
            let mut acc = TSeries::zero(&self.field, crate::series::EXACT_PREC);
            for (k, x) in v.iter().enumerate() {
                acc = acc.add(&self.rows[i][k].mul(x)?)?;
            }
            out.push(acc);
        }
        Ok(out)
    }

    /// Determinant by cofactor expansion (ranks here are small).
    pub fn det(&self) -> Result<TSeries> {
        fn go(m: &Mat, rows: &[usize], cols: &[usize]) -> Result<TSeries> {
            if rows.len() == 1 {
                return Ok(m.rows[rows[0]][cols[0]].clone());
            }
            let mut acc = TSeries::zero(&m.field, crate::series::EXACT_PREC);
            let sub_rows: Vec<usize> = rows[1..].to_vec();
            for (idx, &c) in cols.iter().enumerate() {
                let entry = &m.rows[rows[0]][c];
                if entry.is_zero() {
                    continue;
                }
                let sub_cols: Vec<usize> = cols
                    .iter()
                    .copied()
                    .filter(|&x| x != c)
                    .collect();
                let minor = go(m, &sub_rows, &sub_cols)?;
                let term = entry.mul(&minor)?;
                acc = if idx % 2 == 0 {
                    acc.add(&term)?
                } else {
                    acc.sub(&term)?
                };
            }
            Ok(acc)
        }
        let all: Vec<usize> = (0..self.n).collect();
        go(self, &all, &all)
    }

    /// Inverse via the adjugate; requires the determinant to be a unit
    /// times a power of t with known leading coefficient.
    pub fn inverse(&self) -> Result<Mat> {
        let d = self.det()?;
        if d.is_zero() {
            return Err(Error::NotInvertible);
        }
        let dinv = d.invert_unit()?;
        if self.n == 1 {
            return Mat::new(&self.field, vec![vec![dinv]]);
        }
        let mut rows = vec![vec![TSeries::zero(&self.field, 0); self.n]; self.n];
        let all: Vec<usize> = (0..self.n).collect();
        for i in 0..self.n {
            for j in 0..self.n {
                // cofactor C_ji for the adjugate
                let sub_rows: Vec<usize> = all.iter().copied().filter(|&r| r != j).collect();
                let sub_cols: Vec<usize> = all.iter().copied().filter(|&c| c != i).collect();
                let minor = Mat {
                    field: self.field.clone(),
                    n: self.n - 1,
                    rows: sub_rows
                        .iter()
                        .map(|&r| sub_cols.iter().map(|&c| self.rows[r][c].clone()).collect())
                        .collect(),
                }
                .det()?;
                let signed = if (i + j) % 2 == 0 {
                    minor
                } else {
                    minor.neg()
                };
                rows[i][j] = signed.mul(&dinv)?;
            }
        }
        Mat::new(&self.field, rows)
    }

    /// Entry-wise `t -> t^q` with fixed coefficients.
    pub fn frobenius_subst(&self, q: u64) -> Mat {
        Mat {
            field: self.field.clone(),
            n: self.n,
            rows: self
                .rows
                .iter()
                .map(|r| r.iter().map(|x| x.frobenius_subst(q, 0)).collect())
                .collect(),
        }
    }

    /// Entry-wise substitution of `g` for `t`.
    pub fn compose(&self, g: &TSeries) -> Result<Mat> {
        let rows = self
            .rows
            .iter()
            .map(|r| r.iter().map(|x| x.compose(g)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Mat::new(&self.field, rows)
    }

    pub fn eq_mod(&self, other: &Mat, k: i64) -> bool {
        self.n == other.n
            && self
                .rows
                .iter()
                .zip(&other.rows)
                .all(|(a, b)| a.iter().zip(b).all(|(x, y)| x.eq_mod(y, k)))
    }
}

// ---------------------------------------------------------------------------
// the module type
// ---------------------------------------------------------------------------

/// Deterministic recipe for the gamma-matrix of a unit.
#[derive(Debug, Clone)]
enum GammaSpec {
    /// Diagonal with entries `fbar(u)^(h q^j (q-1)/(q^n-1))`.
    Ind { h: i64 },
    /// Rank 1, `(residue(u)^s)`.
    Char { s: i64 },
    /// `Ind` scaled by `residue(u)^s`.
    Twisted { h: i64, s: i64 },
    /// `P^{-1} . base(u) . (P o [u](t))` after a base change.
    Conjugated {
        p: Mat,
        p_inv: Mat,
        base: Box<GammaSpec>,
    },
    /// Determinant of the base gamma-matrix.
    DetOf { base: Box<GammaSpec>, base_rank: usize },
}

/// Deliberate corruption hooks for negative controls.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Corruption {
    /// Multiply the diagonal gamma-entry at this index by one extra
    /// `fbar(u)` factor (exponent + 1).
    ExponentBump(usize),
    /// Negate the gamma-entry at this diagonal index.
    SignFlip(usize),
}

/// An explicit etale (phi,Gamma)-module over `k((t))`.
#[derive(Debug, Clone)]
pub struct PhiGammaModule {
    spec: Arc<LocalFieldSpec>,
    phi_spec: PhiSpec,
    field: Arc<FiniteField>,
    nrank: usize,
    prec: i64,
    phi_matrix: Mat,
    gamma: GammaSpec,
    memo: Arc<Mutex<HashMap<String, Mat>>>,
    corruption: Option<Corruption>,
}

/// The smallest field containing both arguments (their degrees must be
/// comparable; general compositum is not needed here).
fn join_field(a: &Arc<FiniteField>, b: &Arc<FiniteField>) -> Result<Arc<FiniteField>> {
    if a.p != b.p {
        return Err(Error::FieldMismatch);
    }
    if b.m % a.m == 0 {
        Ok(b.clone())
    } else if a.m % b.m == 0 {
        Ok(a.clone())
    } else {
        Err(Error::NoEmbedding(a.m, b.m))
    }
}

impl PhiGammaModule {
    /// The Theorem's module `ind(omega_{nf}^h)` in the basis
    /// `e_0, ..., e_{n-1}`: `phi(e_j) = e_{j+1}` and
    /// `phi(e_{n-1}) = (-1)^{n-1} t^{-h(q-1)} e_0`.
    pub fn construct_ind(
        h: i64,
        n: usize,
        big_n: i64,
        spec: &Arc<LocalFieldSpec>,
        phi: &PhiSpec,
    ) -> Result<Self> {
        let q = spec.q();
        if n > 1 && !is_q_primitive(h, q, n)? {
            return Err(Error::NotPrimitive(h));
        }
        if n == 1 && (h < 0 || h > q as i64 - 2) {
            return Err(Error::OutOfRange(h, q, n));
        }
        let field = spec.residue_field().clone();
        let zero = TSeries::zero(&field, crate::series::EXACT_PREC);
        let mut rows = vec![vec![zero; n]; n];
        let sign = field.from_int(-1).pow((n as u128 - 1) % 2);
        let corner = TSeries::monomial(&field, sign, -h * (q as i64 - 1));
        if n == 1 {
            rows[0][0] = corner;
        } else {
            for j in 0..n - 1 {
                rows[j + 1][j] = TSeries::one(&field);
            }
            rows[0][n - 1] = corner;
        }
        Ok(PhiGammaModule {
            spec: spec.clone(),
            phi_spec: phi.clone(),
            field: field.clone(),
            nrank: n,
            prec: big_n,
            phi_matrix: Mat::new(&field, rows)?,
            gamma: GammaSpec::Ind { h },
            memo: Arc::new(Mutex::new(HashMap::new())),
            corruption: None,
        })
    }

    /// The Lemma's rank-1 module: `phi(e) = lambda e`,
    /// `gamma(e) = residue(u)^s e`.
    pub fn construct_char(
        s: i64,
        lam: &FFElem,
        big_n: i64,
        spec: &Arc<LocalFieldSpec>,
        phi: &PhiSpec,
    ) -> Result<Self> {
        if lam.is_zero() {
            return Err(Error::ZeroLambda);
        }
        let field = join_field(spec.residue_field(), &lam.field)?;
        let lam_e = embed(lam, &field)?;
        let rows = vec![vec![TSeries::monomial(&field, lam_e, 0)]];
        Ok(PhiGammaModule {
            spec: spec.clone(),
            phi_spec: phi.clone(),
            field: field.clone(),
            nrank: 1,
            prec: big_n,
            phi_matrix: Mat::new(&field, rows)?,
            gamma: GammaSpec::Char {
                s: s.rem_euclid(spec.q() as i64 - 1),
            },
            memo: Arc::new(Mutex::new(HashMap::new())),
            corruption: None,
        })
    }

    /// The Corollary's module: `construct_ind` with phi scaled by lambda
    /// and gamma scaled by `residue(u)^s`.
    pub fn construct_twisted(
        h: i64,
        s: i64,
        lam: &FFElem,
        n: usize,
        big_n: i64,
        spec: &Arc<LocalFieldSpec>,
        phi: &PhiSpec,
    ) -> Result<Self> {
        if lam.is_zero() {
            return Err(Error::ZeroLambda);
        }
        let lam_pow_n = lam.pow(n as u128);
        if lam_pow_n.frobenius_power(1, spec.q()) != lam_pow_n {
            return Err(Error::Invalid("lambda^n is not in F_q".into()));
        }
        let base = Self::construct_ind(h, n, big_n, spec, phi)?;
        let field = join_field(&base.field, &lam.field)?;
        let lam_e = embed(lam, &field)?;
        let lam_series = TSeries::monomial(&field, lam_e, 0);
        let mut rows = Vec::with_capacity(n);
        for r in &base.phi_matrix.rows {
            let mut row = Vec::with_capacity(n);
            for x in r {
                row.push(x.embed_into(&field)?.mul(&lam_series)?);
            }
            rows.push(row);
        }
        Ok(PhiGammaModule {
            spec: spec.clone(),
            phi_spec: phi.clone(),
            field: field.clone(),
            nrank: n,
            prec: big_n,
            phi_matrix: Mat::new(&field, rows)?,
            gamma: GammaSpec::Twisted {
                h,
                s: s.rem_euclid(spec.q() as i64 - 1),
            },
            memo: Arc::new(Mutex::new(HashMap::new())),
            corruption: None,
        })
    }

    pub fn rank(&self) -> usize {
        self.nrank
    }

    pub fn prec(&self) -> i64 {
        self.prec
    }

    pub fn field(&self) -> &Arc<FiniteField> {
        &self.field
    }

    pub fn spec(&self) -> &Arc<LocalFieldSpec> {
        &self.spec
    }

    pub fn phi_matrix(&self) -> &Mat {
        &self.phi_matrix
    }

    /// Installs a corruption hook (negative-control testing only).
    pub fn with_corruption(mut self, c: Corruption) -> Self {
        self.corruption = Some(c);
        self.memo = Arc::new(Mutex::new(HashMap::new()));
        self
    }

    /// The substitution series of `u`, in the module's coefficient field.
    pub fn substitution(&self, u: &UnitValue) -> Result<TSeries> {
        gamma_series(&self.spec, u, &self.phi_spec, self.prec)?.embed_into(&self.field)
    }

    fn gamma_eval(&self, g: &GammaSpec, u: &UnitValue) -> Result<Mat> {
        match g {
            GammaSpec::Ind { h } => {
                let n = self.nrank;
                let q = self.spec.q() as i64;
                let m = (0..n as u32).fold(1i64, |acc, _| acc * q) - 1; // q^n - 1
                let fb = fbar(&self.spec, u, &self.phi_spec, self.prec)?;
                let zero = TSeries::zero(&self.field, self.prec);
                let mut rows = vec![vec![zero; n]; n];
                let mut qj = 1i64;
                for (j, row) in rows.iter_mut().enumerate() {
                    let exp = PExponent::new(h * qj * (q - 1), m as u64);
                    let entry = one_unit_pow(&fb, &exp, self.prec)?;
                    row[j] = entry.embed_into(&self.field)?;
                    qj *= q;
                }
                Mat::new(&self.field, rows)
            }
            GammaSpec::Char { s } => {
                let ubar = embed(&u.residue(&self.spec)?, &self.field)?;
                if ubar.is_zero() {
                    return Err(Error::NotAUnit);
                }
                let entry = TSeries::monomial(&self.field, ubar.pow(*s as u128), 0);
                Mat::new(&self.field, vec![vec![entry]])
            }
            GammaSpec::Twisted { h, s } => {
                let diag = self.gamma_eval(&GammaSpec::Ind { h: *h }, u)?;
                let ubar = embed(&u.residue(&self.spec)?, &self.field)?;
                let scale = TSeries::monomial(&self.field, ubar.pow(*s as u128), 0);
                let rows = diag
                    .rows
                    .iter()
                    .map(|r| {
                        r.iter()
                            .map(|x| x.mul(&scale))
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()?;
                Mat::new(&self.field, rows)
            }
            GammaSpec::Conjugated { p, p_inv, base } => {
                let inner = self.gamma_eval(base, u)?;
                let g = self.substitution(u)?;
                p_inv.mul(&inner)?.mul(&p.compose(&g)?)
            }
            GammaSpec::DetOf { base, base_rank } => {
                let saved = self.nrank;
                // evaluate the base at its own rank
                let tmp = PhiGammaModule {
                    nrank: *base_rank,
                    ..self.clone()
                };
                let inner = tmp.gamma_eval(base, u)?;
                let _ = saved;
                let d = inner.det()?;
                Mat::new(&self.field, vec![vec![d]])
            }
        }
    }

    /// The gamma-matrix of the unit `u` (memoized).
    pub fn gamma_matrix(&self, u: &UnitValue) -> Result<Mat> {
        let key = format!("{}|{}", u.fingerprint(), self.prec);
        if let Some(hit) = self.memo.lock().unwrap().get(&key) {
            return Ok(hit.clone());
        }
        let mut m = self.gamma_eval(&self.gamma, u)?;
        if let Some(c) = self.corruption {
            match c {
                Corruption::ExponentBump(idx) => {
                    let fb = fbar(&self.spec, u, &self.phi_spec, self.prec)?
                        .embed_into(&self.field)?;
                    let idx = idx % self.nrank;
                    m.rows[idx][idx] = m.rows[idx][idx].mul(&fb)?;
                }
                Corruption::SignFlip(idx) => {
                    let idx = idx % self.nrank;
                    m.rows[idx][idx] = m.rows[idx][idx].neg();
                }
            }
        }
        self.memo.lock().unwrap().insert(key, m.clone());
        Ok(m)
    }

    /// Semilinear phi: `v -> Phi . sigma(v)` with `sigma: t -> t^q`.
    pub fn apply_phi(&self, v: &[TSeries]) -> Result<Vec<TSeries>> {
        if v.len() != self.nrank {
            return Err(Error::DimensionMismatch);
        }
        let q = self.spec.q();
        let tv: Vec<TSeries> = v.iter().map(|x| x.frobenius_subst(q, 0)).collect();
        self.phi_matrix.mul_vec(&tv)
    }

    /// Semilinear gamma: `v -> Gamma(u) . (v o [u](t))`.
    pub fn apply_gamma(&self, u: &UnitValue, v: &[TSeries]) -> Result<Vec<TSeries>> {
        if v.len() != self.nrank {
            return Err(Error::DimensionMismatch);
        }
        let g = self.substitution(u)?;
        let gv = v
            .iter()
            .map(|x| x.compose(&g))
            .collect::<Result<Vec<_>>>()?;
        self.gamma_matrix(u)?.mul_vec(&gv)
    }

    /// Standard basis vector `e_j`.
    pub fn basis_vector(&self, j: usize) -> Vec<TSeries> {
        let mut v = vec![TSeries::zero(&self.field, crate::series::EXACT_PREC); self.nrank];
        v[j] = TSeries::one(&self.field);
        v
    }

    /// Verifies that phi and gamma_u commute on all basis vectors, to
    /// depth `n_check`.
    pub fn check_commutation(&self, u: &UnitValue, n_check: i64) -> Result<Report> {
        let params = json!({
            "spec": self.spec.fingerprint(),
            "rank": self.nrank,
            "u": u.fingerprint(),
            "prec": n_check,
        });
        for j in 0..self.nrank {
            let e = self.basis_vector(j);
            let lhs = self.apply_gamma(u, &self.apply_phi(&e)?)?;
            let rhs = self.apply_phi(&self.apply_gamma(u, &e)?)?;
            for (i, (a, b)) in lhs.iter().zip(&rhs).enumerate() {
                let depth = n_check.min(a.prec()).min(b.prec());
                if depth < 1 {
                    return Ok(Report::failure(
                        "commutation",
                        params,
                        format!("precision exhausted at entry ({i},{j})"),
                    ));
                }
                if !a.eq_mod(b, depth) {
                    return Ok(Report::failure(
                        "commutation",
                        params,
                        format!("gamma(phi(e_{j})) != phi(gamma(e_{j})) at entry {i}"),
                    ));
                }
            }
        }
        Ok(Report::success("commutation", params))
    }

    /// Verifies the matrix cocycle identity
    /// `Gamma(uv) = Gamma(u) . (Gamma(v) o [u](t))` to depth `n_check`.
    pub fn check_cocycle(&self, u: &UnitValue, v: &UnitValue, n_check: i64) -> Result<Report> {
        let params = json!({
            "spec": self.spec.fingerprint(),
            "rank": self.nrank,
            "u": u.fingerprint(),
            "v": v.fingerprint(),
            "prec": n_check,
        });
        let uv = unit_product(&self.spec, u, v, 2 * crate::lubin_tate::default_k(self.spec.q(), self.prec) + 4)?;
        let lhs = self.gamma_matrix(&uv)?;
        let g = self.substitution(u)?;
        let rhs = self.gamma_matrix(u)?.mul(&self.gamma_matrix(v)?.compose(&g)?)?;
        for i in 0..self.nrank {
            for j in 0..self.nrank {
                let (a, b) = (&lhs.rows[i][j], &rhs.rows[i][j]);
                let depth = n_check.min(a.prec()).min(b.prec());
                if depth < 1 || !a.eq_mod(b, depth) {
                    return Ok(Report::failure(
                        "cocycle",
                        params,
                        format!("entry ({i},{j}) disagrees"),
                    ));
                }
            }
        }
        Ok(Report::success("cocycle", params))
    }

    /// Top exterior power: rank-1 module with phi-scalar `det(Phi)` and
    /// gamma-scalar `det(Gamma(u))`.
    pub fn det_module(&self) -> Result<PhiGammaModule> {
        let d = self.phi_matrix.det()?;
        Ok(PhiGammaModule {
            spec: self.spec.clone(),
            phi_spec: self.phi_spec.clone(),
            field: self.field.clone(),
            nrank: 1,
            prec: self.prec,
            phi_matrix: Mat::new(&self.field, vec![vec![d]])?,
            gamma: GammaSpec::DetOf {
                base: Box::new(self.gamma.clone()),
                base_rank: self.nrank,
            },
            memo: Arc::new(Mutex::new(HashMap::new())),
            corruption: None,
        })
    }

    /// Change of basis `e' = P e`: `Phi' = P^{-1} Phi sigma(P)`,
    /// `Gamma'(u) = P^{-1} Gamma(u) (P o [u](t))`.
    pub fn base_change(&self, p: &Mat) -> Result<PhiGammaModule> {
        if p.n != self.nrank {
            return Err(Error::DimensionMismatch);
        }
        let p_inv = p.inverse().map_err(|_| Error::NotInvertible)?;
        let phi_new = p_inv
            .mul(&self.phi_matrix)?
            .mul(&p.frobenius_subst(self.spec.q()))?;
        Ok(PhiGammaModule {
            spec: self.spec.clone(),
            phi_spec: self.phi_spec.clone(),
            field: self.field.clone(),
            nrank: self.nrank,
            prec: self.prec,
            phi_matrix: phi_new,
            gamma: GammaSpec::Conjugated {
                p: p.clone(),
                p_inv,
                base: Box::new(self.gamma.clone()),
            },
            memo: Arc::new(Mutex::new(HashMap::new())),
            corruption: None,
        })
    }
}

/// The product of two units as an exact digit expansion to `k` digits.
pub fn unit_product(
    spec: &Arc<LocalFieldSpec>,
    u: &UnitValue,
    v: &UnitValue,
    k: i64,
) -> Result<UnitValue> {
    let a = u.realize(spec, k + 1)?;
    let b = v.realize(spec, k + 1)?;
    Ok(UnitValue::Digits(a.mul(&b)?.digits(k)?))
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

    #[test]
    fn ind_phi_matrix_shape() {
        let s = q2();
        let m = PhiGammaModule::construct_ind(1, 2, 32, &s, &PhiSpec::Default).unwrap();
        let f2 = s.residue_field().clone();
        // e_0 -> e_1
        let c0 = m.apply_phi(&m.basis_vector(0)).unwrap();
        assert!(c0[0].is_zero());
        assert!(c0[1].eq_mod(&TSeries::one(&f2), 30));
        // e_1 -> t^{-1} e_0 (char 2 kills the sign)
        let c1 = m.apply_phi(&m.basis_vector(1)).unwrap();
        assert!(c1[0].eq_mod(&TSeries::monomial(&f2, f2.one(), -1), 30));
        assert!(c1[1].is_zero());
        // semilinearity: t e_0 -> t^q e_1
        let mut v = m.basis_vector(0);
        v[0] = TSeries::monomial(&f2, f2.one(), 1);
        let c = m.apply_phi(&v).unwrap();
        assert!(c[1].eq_mod(&TSeries::monomial(&f2, f2.one(), 2), 30));
    }

    #[test]
    fn etale_determinant_is_monomial() {
        let s = q3();
        let f9 = FiniteField::get(3, 2);
        let lam = f9.elem(&[1, 1]); // order 8; lam^2 in F_3? (1+x)^2 = 2x no
        let lam = lam.pow(2); // order 4, lam^2 = -1 in F_3
        let m = PhiGammaModule::construct_twisted(1, 1, &lam, 2, 32, &s, &PhiSpec::Default)
            .unwrap();
        let d = m.phi_matrix().det().unwrap();
        assert!(d.is_exact());
        assert_eq!(d.val(), -1 * (3 - 1)); // -h(q-1)
        // leading coefficient = lambda^n (times +1)
        let lead = d.coeff(d.val()).unwrap();
        assert_eq!(lead, embed(&lam.pow(2), &m.field().clone()).unwrap());
    }

    #[test]
    fn gamma_teichmuller_is_identity() {
        let s = q3();
        let m = PhiGammaModule::construct_ind(1, 2, 32, &s, &PhiSpec::Default).unwrap();
        let tau = UnitValue::Digits(vec![s.residue_field().from_int(2)]);
        let g = m.gamma_matrix(&tau).unwrap();
        assert!(g.eq_mod(&Mat::identity(m.field(), 2), 32));
    }

    #[test]
    fn gamma_entry_cube_oracle() {
        // q=2, n=2, h=1, u=3: entry j=0 is fbar(3)^(1/3); cubing it must
        // give fbar(3)
        let s = q2();
        let n = 32;
        let m = PhiGammaModule::construct_ind(1, 2, n, &s, &PhiSpec::Default).unwrap();
        let u = UnitValue::Int(3);
        let g = m.gamma_matrix(&u).unwrap();
        let fb = fbar(&s, &u, &PhiSpec::Default, n).unwrap();
        let cubed = g.rows[0][0].pow_i(3).unwrap();
        assert!(cubed.eq_mod(&fb, n));
        // entry j=1: exponent 2/3, so cube = fbar^2
        let sq = g.rows[1][1].pow_i(3).unwrap();
        assert!(sq.eq_mod(&fb.pow_i(2).unwrap(), n));
    }

    #[test]
    fn char_module_examples() {
        let s = q3();
        let f3 = s.residue_field().clone();
        // trivial module
        let m = PhiGammaModule::construct_char(0, &f3.one(), 16, &s, &PhiSpec::Default).unwrap();
        let g = m.gamma_matrix(&UnitValue::Int(2)).unwrap();
        assert!(g.rows[0][0].eq_mod(&TSeries::one(&f3), 16));
        // s = 1: gamma = (ubar)
        let m = PhiGammaModule::construct_char(1, &f3.from_int(-1), 16, &s, &PhiSpec::Default)
            .unwrap();
        assert!(m.phi_matrix().rows[0][0]
            .eq_mod(&TSeries::monomial(&f3, f3.from_int(2), 0), 16));
        let g = m.gamma_matrix(&UnitValue::Int(2)).unwrap();
        assert!(g.rows[0][0].eq_mod(&TSeries::monomial(&f3, f3.from_int(2), 0), 16));
        assert!(matches!(
            PhiGammaModule::construct_char(1, &f3.zero(), 16, &s, &PhiSpec::Default),
            Err(Error::ZeroLambda)
        ));
    }

    #[test]
    fn commutation_holds() {
        for s in [q2(), q3()] {
            let n_check = 24;
            let margin = 2 * (s.q() as i64 - 1) * 2 + 8;
            let m =
                PhiGammaModule::construct_ind(1, 2, n_check + margin, &s, &PhiSpec::Default)
                    .unwrap();
            for u in [UnitValue::Int(1 + s.p as i64), UnitValue::Int(1)] {
                let r = m.check_commutation(&u, n_check).unwrap();
                assert!(r.ok, "{:?}", r.first_failure);
            }
        }
    }

    #[test]
    fn commutation_negative_control() {
        let s = q3();
        let m = PhiGammaModule::construct_ind(1, 2, 40, &s, &PhiSpec::Default).unwrap();
        let u = UnitValue::Int(4);
        for c in [Corruption::ExponentBump(0), Corruption::SignFlip(1)] {
            let bad = m.clone().with_corruption(c);
            let r = bad.check_commutation(&u, 24).unwrap();
            assert!(!r.ok, "corruption {c:?} not detected");
        }
        // the pristine module still passes
        let r = m.check_commutation(&u, 24).unwrap();
        assert!(r.ok);
    }

    #[test]
    fn cocycle_holds() {
        let s = q3();
        let m = PhiGammaModule::construct_ind(1, 2, 48, &s, &PhiSpec::Default).unwrap();
        let u = UnitValue::Int(4);
        let v = UnitValue::Int(-2); // 1 - 3
        let r = m.check_cocycle(&u, &v, 24).unwrap();
        assert!(r.ok, "{:?}", r.first_failure);
        // v = 1 is the identity case
        let r = m.check_cocycle(&u, &UnitValue::Int(1), 24).unwrap();
        assert!(r.ok);
    }

    #[test]
    fn det_after_rescale_matches_char() {
        // Theorem proof: det of ind(h), after base change by (t^h), is
        // phi = 1 and gamma = residue(u)^h
        for (s, h, n) in [(q2(), 1i64, 2usize), (q3(), 1, 2), (q3(), 2, 2)] {
            let big_n = 48;
            let m = PhiGammaModule::construct_ind(h, n, big_n, &s, &PhiSpec::Default).unwrap();
            let det = m.det_module().unwrap();
            let f = det.field().clone();
            let p_mat = Mat::new(&f, vec![vec![TSeries::monomial(&f, f.one(), h)]]).unwrap();
            let scaled = det.base_change(&p_mat).unwrap();
            // phi-scalar is exactly 1
            assert!(scaled.phi_matrix().rows[0][0].eq_mod(&TSeries::one(&f), 8));
            // gamma-scalar is residue(u)^h for several units
            for u in [UnitValue::Int(1 + s.p as i64), UnitValue::Int(2 * s.p as i64 - 1)] {
                let g = scaled.gamma_matrix(&u).unwrap();
                let expect = u.residue(&s).unwrap().pow(h as u128);
                let depth = g.rows[0][0].prec().min(16);
                assert!(
                    g.rows[0][0].eq_mod(&TSeries::monomial(&f, expect, 0), depth),
                    "spec {} h={h} u={:?}: {:?}",
                    s.fingerprint(),
                    u,
                    g.rows[0][0]
                );
            }
        }
    }

    #[test]
    fn base_change_roundtrip() {
        let s = q3();
        let m = PhiGammaModule::construct_ind(1, 2, 40, &s, &PhiSpec::Default).unwrap();
        let f = m.field().clone();
        let p = Mat::new(
            &f,
            vec![
                vec![TSeries::one(&f), TSeries::monomial(&f, f.one(), 1)],
                vec![TSeries::zero(&f, crate::series::EXACT_PREC), TSeries::one(&f)],
            ],
        )
        .unwrap();
        let moved = m.base_change(&p).unwrap();
        let back = moved.base_change(&p.inverse().unwrap()).unwrap();
        assert!(back.phi_matrix().eq_mod(m.phi_matrix(), 30));
        let u = UnitValue::Int(4);
        let ga = back.gamma_matrix(&u).unwrap();
        let gb = m.gamma_matrix(&u).unwrap();
        let depth = ga
            .rows
            .iter()
            .flatten()
            .chain(gb.rows.iter().flatten())
            .map(|x| x.prec())
            .min()
            .unwrap()
            .min(30);
        assert!(ga.eq_mod(&gb, depth));
        // singular base change rejected
        let zero = TSeries::zero(&f, crate::series::EXACT_PREC);
        let sing = Mat::new(&f, vec![vec![zero.clone(), zero.clone()], vec![zero.clone(), zero]])
            .unwrap();
        assert!(matches!(m.base_change(&sing), Err(Error::NotInvertible)));
    }

    #[test]
    fn twisted_reduces_to_ind() {
        let s = q3();
        let f3 = s.residue_field().clone();
        let ind = PhiGammaModule::construct_ind(1, 2, 32, &s, &PhiSpec::Default).unwrap();
        let tw =
            PhiGammaModule::construct_twisted(1, 0, &f3.one(), 2, 32, &s, &PhiSpec::Default)
                .unwrap();
        assert!(tw.phi_matrix().eq_mod(ind.phi_matrix(), 30));
        let u = UnitValue::Int(4);
        let depth = 24;
        assert!(tw
            .gamma_matrix(&u)
            .unwrap()
            .eq_mod(&ind.gamma_matrix(&u).unwrap(), depth));
    }

    #[test]
    fn apply_gamma_semilinearity() {
        let s = q3();
        let m = PhiGammaModule::construct_ind(1, 2, 32, &s, &PhiSpec::Default).unwrap();
        let f = m.field().clone();
        let u = UnitValue::Int(4);
        // u = 1 acts as the identity
        let mut v = m.basis_vector(0);
        v[0] = TSeries::poly(&f, 0, vec![f.one(), f.from_int(2)]);
        let w = m.apply_gamma(&UnitValue::Int(1), &v).unwrap();
        assert!(w[0].eq_mod(&v[0], 30));
        // t e_0 -> [u](t) . gamma-entry_0 e_0
        let mut v = m.basis_vector(0);
        v[0] = TSeries::monomial(&f, f.one(), 1);
        let w = m.apply_gamma(&u, &v).unwrap();
        let g = m.substitution(&u).unwrap();
        let expect = g.mul(&m.gamma_matrix(&u).unwrap().rows[0][0]).unwrap();
        let depth = w[0].prec().min(expect.prec()).min(30);
        assert!(w[0].eq_mod(&expect, depth));
    }
}
