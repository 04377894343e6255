//! The tame extension F'((y)) with y^d = t, d = (q^n-1)/(q-1), the
//! inertia action on y, the product-ring Frobenius, and the proof vectors
//! v_j together with their fixedness and eigenvalue checks. Also the
//! unramified descent producing the rank-1 basis element with
//! phi(e) = lambda e.
//!
//! Elements of the tame ring are plain truncated Laurent series in the
//! uniformizer y over F'; the defining relation t = y^d is exact exponent
//! arithmetic, so no quotient structure is needed.

use crate::error::{Error, Result};
use crate::ffield::{
    embed, log_base, normal_basis_element, semilinear_fixed_basis, FFElem, FiniteField,
};
use crate::lubin_tate::{default_k, fbar, PhiSpec, UnitValue};
use crate::padic::LocalFieldSpec;
use crate::phigamma::{unit_product, PhiGammaModule};
use crate::report::Report;
use crate::series::TSeries;
use crate::unit_exp::{one_unit_pow, PExponent};
use serde_json::json;
use std::sync::Arc;

fn smallest_prime_factor(q: u64) -> u64 {
    let mut d = 2;
    while d * d <= q {
        if q % d == 0 {
            return d;
        }
        d += 1;
    }
    q
}

/// The ramified extension `F'((y))` of `F_q((t))` with `y^d = t`.
#[derive(Debug, Clone)]
pub struct TameRing {
    spec: Arc<LocalFieldSpec>,
    phi_spec: PhiSpec,
    fprime: Arc<FiniteField>,
    n: usize,
    d: i64,
}

/// An inertia element, recorded through the two values that determine its
/// action: the cyclotomic-character value `u` and the fundamental-character
/// value `zeta`.
#[derive(Debug, Clone)]
pub struct InertiaElem {
    pub u: UnitValue,
    pub zeta: FFElem,
}

/// A vector in the product model: `entries[c][i]` is the `c`-th product
/// component of the coefficient of the basis vector `e_i`.
#[derive(Debug, Clone)]
pub struct ProductVector {
    pub entries: Vec<Vec<TSeries>>,
}

impl TameRing {
    pub fn new(spec: &Arc<LocalFieldSpec>, phi: &PhiSpec, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Invalid("rank must be positive".into()));
        }
        let q = spec.q();
        let p = spec.p;
        let f = log_base(q, p);
        let qn = (q as u128).pow(n as u32);
        let d = ((qn - 1) / (q as u128 - 1)) as i64;
        // F' must contain the sign root alpha: F_{q^{2n}} when the sign
        // (-1)^{n-1} is nontrivial in F_p
        let double = p != 2 && n % 2 == 0;
        let deg = f * n * if double { 2 } else { 1 };
        Ok(TameRing {
            spec: spec.clone(),
            phi_spec: phi.clone(),
            fprime: FiniteField::get(p, deg),
            n,
            d,
        })
    }

    pub fn coeff_field(&self) -> &Arc<FiniteField> {
        &self.fprime
    }

    pub fn ramification_degree(&self) -> i64 {
        self.d
    }

    pub fn y(&self) -> TSeries {
        TSeries::monomial(&self.fprime, self.fprime.one(), 1)
    }

    /// Re-expresses a series in `t` as a series in `y` via `t = y^d`:
    /// exponents and precision are multiplied by `d` exactly.
    pub fn lift_to_y(&self, f: &TSeries) -> Result<TSeries> {
        f.frobenius_subst(self.d as u64, 0).embed_into(&self.fprime)
    }

    /// The `q`-power Frobenius of the tame ring: coefficient `q`-power and
    /// `y -> y^q`.
    pub fn frobenius(&self, x: &TSeries) -> TSeries {
        x.frobenius_subst(self.spec.q(), 1)
    }

    /// Validates the compatibility `zeta^d = residue(u)`.
    pub fn check_compatible(&self, g: &InertiaElem) -> Result<()> {
        let ze = embed(&g.zeta, &self.fprime)?;
        if ze.is_zero() {
            return Err(Error::IncompatiblePair);
        }
        let ubar = embed(&g.u.residue(&self.spec)?, &self.fprime)?;
        if ze.pow(self.d as u128) != ubar {
            return Err(Error::IncompatiblePair);
        }
        Ok(())
    }

    /// Deterministic compatible `zeta` for a unit: the first element of
    /// `F_{q^n}` (enumeration order) whose `d`-th power is `residue(u)`.
    pub fn compatible_zeta(&self, u: &UnitValue) -> Result<FFElem> {
        let q = self.spec.q();
        let p = self.spec.p;
        let f = log_base(q, p);
        let kn = FiniteField::get(p, f * self.n);
        let ubar = embed(&u.residue(&self.spec)?, &kn)?;
        if ubar.is_zero() {
            return Err(Error::NotAUnit);
        }
        for idx in 1..kn.order() {
            let z = kn.elem_at(idx);
            if z.pow(self.d as u128) == ubar {
                return Ok(z);
            }
        }
        Err(Error::SearchFailed("no compatible zeta".into()))
    }

    /// The image of `y` under the inertia element:
    /// `y -> y zeta^q fbar_u^{-(q-1)/(q^n-1)}(t)`, to `y`-precision at
    /// least `n_y`.
    pub fn image_of_y(&self, g: &InertiaElem, n_y: i64) -> Result<TSeries> {
        self.check_compatible(g)?;
        let q = self.spec.q();
        let nt = (n_y + self.d - 1) / self.d + 2;
        let fb = fbar(&self.spec, &g.u, &self.phi_spec, nt)?;
        let qn = (q as u128).pow(self.n as u32);
        let exp = PExponent::new(-(q as i64 - 1), (qn - 1) as u64);
        let c = one_unit_pow(&fb, &exp, nt)?;
        let ze = embed(&g.zeta, &self.fprime)?.pow(q as u128);
        TSeries::monomial(&self.fprime, ze, 1).mul(&self.lift_to_y(&c)?)
    }

    /// The ring endomorphism determined by `y -> image_of_y` and trivial
    /// action on `F'`-coefficients.
    pub fn inertia_act(&self, g: &InertiaElem, x: &TSeries, n_y: i64) -> Result<TSeries> {
        let margin = x.val().abs() + 2 * self.d;
        let img = self.image_of_y(g, n_y + margin)?;
        x.compose(&img)
    }

    /// Verifies that the action composes along the group law
    /// `(u1, z1)(u2, z2) = (u1 u2, z1 z2)` on the generators `y` and
    /// `1 + t`, to depth `n_y`.
    pub fn check_action_group_law(
        &self,
        g1: &InertiaElem,
        g2: &InertiaElem,
        n_y: i64,
    ) -> Result<Report> {
        let params = json!({
            "spec": self.spec.fingerprint(),
            "n": self.n,
            "g1": g1.u.fingerprint(),
            "g2": g2.u.fingerprint(),
            "prec": n_y,
        });
        self.check_compatible(g1)?;
        self.check_compatible(g2)?;
        let k = 2 * default_k(self.spec.q(), n_y) + 4;
        let g12 = InertiaElem {
            u: unit_product(&self.spec, &g1.u, &g2.u, k)?,
            zeta: g1.zeta.mul(&g2.zeta),
        };
        let fq = self.spec.residue_field().clone();
        let one_plus_t = self.lift_to_y(&TSeries::poly(&fq, 0, vec![fq.one(), fq.one()]))?;
        for (name, x) in [("y", self.y()), ("1+t", one_plus_t)] {
            let a = self.inertia_act(&g12, &x, n_y)?;
            let b = self.inertia_act(g1, &self.inertia_act(g2, &x, n_y)?, n_y)?;
            let depth = n_y.min(a.prec()).min(b.prec());
            if depth < 1 || !a.eq_mod(&b, depth) {
                return Ok(Report::failure(
                    "action_group_law",
                    params,
                    format!("composite action disagrees on {name}"),
                ));
            }
        }
        Ok(Report::success("action_group_law", params))
    }

    /// The proof vectors `v_0, ..., v_{n-1}`: `v_j` carries
    /// `alpha^{q^i} y^{q^i h}` in product component `(j+i) mod n` against
    /// the basis vector `e_i`.
    pub fn build_vj(
        &self,
        m: &PhiGammaModule,
        alpha: &FFElem,
        h: i64,
    ) -> Result<Vec<ProductVector>> {
        if m.rank() != self.n {
            return Err(Error::ShapeMismatch);
        }
        let q = self.spec.q();
        let alpha_e = embed(alpha, &self.fprime)?;
        let mut out = Vec::with_capacity(self.n);
        for j in 0..self.n {
            let mut entries =
                vec![vec![TSeries::zero(&self.fprime, crate::series::EXACT_PREC); self.n]; self.n];
            let mut qi = 1i64;
            for i in 0..self.n {
                let c = (j + i) % self.n;
                entries[c][i] =
                    TSeries::monomial(&self.fprime, alpha_e.pow(qi as u128), qi * h);
                qi *= q as i64;
            }
            out.push(ProductVector { entries });
        }
        Ok(out)
    }

    /// Verifies `phi(v) = v` for the product Frobenius
    /// `(x_0,...,x_{n-1}) -> (phi_q(x_{n-1}), phi_q(x_0), ...)` combined
    /// with the module's phi-matrix.
    pub fn check_phi_fixed(
        &self,
        m: &PhiGammaModule,
        v: &ProductVector,
        n_y: i64,
    ) -> Result<Report> {
        let params = json!({
            "spec": self.spec.fingerprint(),
            "n": self.n,
            "prec": n_y,
        });
        if m.rank() != self.n || v.entries.len() != self.n {
            return Err(Error::ShapeMismatch);
        }
        let n = self.n;
        let mut lphi = Vec::with_capacity(n);
        for row in &m.phi_matrix().rows {
            lphi.push(
                row.iter()
                    .map(|x| self.lift_to_y(x))
                    .collect::<Result<Vec<_>>>()?,
            );
        }
        for c in 0..n {
            for k in 0..n {
                let mut acc = TSeries::zero(&self.fprime, crate::series::EXACT_PREC);
                for i in 0..n {
                    // c-th component of the rotated Frobenius of the e_i
                    // coefficient vector
                    let fw = self.frobenius(&v.entries[(c + n - 1) % n][i]);
                    acc = acc.add(&lphi[k][i].mul(&fw)?)?;
                }
                let target = &v.entries[c][k];
                let depth = n_y.min(acc.prec()).min(target.prec());
                if depth < 1 || !acc.eq_mod(target, depth) {
                    return Ok(Report::failure(
                        "phi_fixed",
                        params,
                        format!("phi(v) differs from v at component {c}, basis {k}"),
                    ));
                }
            }
        }
        Ok(Report::success("phi_fixed", params))
    }

    /// Verifies the eigenvalue identity `g(v_j) = zeta^{q^{1-j} h} . v_j`
    /// where `.` is the twisted left `F_{q^n}`-structure
    /// `(a . w)_c = a^{q^c} w_c`.
    pub fn check_inertia_eigen(
        &self,
        m: &PhiGammaModule,
        v: &ProductVector,
        j: usize,
        h: i64,
        g: &InertiaElem,
        n_y: i64,
    ) -> Result<Report> {
        let params = json!({
            "spec": self.spec.fingerprint(),
            "n": self.n,
            "j": j,
            "u": g.u.fingerprint(),
            "prec": n_y,
        });
        if m.rank() != self.n || v.entries.len() != self.n || j >= self.n {
            return Err(Error::ShapeMismatch);
        }
        self.check_compatible(g)?;
        let n = self.n;
        let q = self.spec.q();
        let gm = m.gamma_matrix(&g.u)?;
        let mut lgamma = Vec::with_capacity(n);
        for i in 0..n {
            lgamma.push(self.lift_to_y(&gm.rows[i][i])?);
        }
        // eigenvalue zeta^{q^{1-j} h}, exponent taken mod n in the tower
        let ze = embed(&g.zeta, &self.fprime)?;
        let zexp = (q as u128).pow(((n + 1 - j) % n) as u32) * h as u128;
        let lam0 = ze.pow(zexp);
        for c in 0..n {
            let scale = lam0.frobenius_power(c as i64, q);
            for i in 0..n {
                let entry = &v.entries[c][i];
                if entry.is_zero() {
                    continue;
                }
                let acted = self
                    .inertia_act(g, entry, n_y)?
                    .mul(&lgamma[i])?;
                let expect = entry.scalar_mul(&scale);
                let depth = n_y.min(acted.prec()).min(expect.prec());
                if depth < entry.val() + 1 || !acted.eq_mod(&expect, depth) {
                    return Ok(Report::failure(
                        "inertia_eigen",
                        params,
                        format!("eigenvalue fails at component {c}, basis {i}"),
                    ));
                }
            }
        }
        Ok(Report::success("inertia_eigen", params))
    }
}

/// Output of [`unramified_descent`]: the working field `F_{q^{kn}}`, the
/// auxiliary data `beta` (with `beta^{q^n-1} = lambda^n`) and the normal
/// basis element `x`, and the product components of the basis element `e`.
#[derive(Debug, Clone)]
pub struct DescentData {
    pub field: Arc<FiniteField>,
    pub ext_index: usize,
    pub beta: FFElem,
    pub x: FFElem,
    pub e: Vec<FFElem>,
}

fn prime_factors(mut n: u128) -> Vec<u128> {
    let mut out = vec![];
    let mut d = 2;
    while (d as u128) * (d as u128) <= n {
        if n % d as u128 == 0 {
            out.push(d as u128);
            while n % d as u128 == 0 {
                n /= d as u128;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn gcd_u128(a: u128, b: u128) -> u128 {
    if a == 0 {
        b
    } else {
        gcd_u128(b % a, a)
    }
}

fn mod_inv_u128(a: u128, m: u128) -> Option<u128> {
    if m == 1 {
        return Some(0);
    }
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let qq = old_r / r;
        (old_r, r) = (r, old_r - qq * r);
        (old_s, s) = (s, old_s - qq * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u128)
}

/// Solve `x^k = c` in `F'` when all solutions lie in small torsion: every
/// solution satisfies `x^{k ord(c)} = 1`, so the search happens inside the
/// subgroup of that order.
fn small_torsion_root(c: &FFElem, k: u128, c_order: u128) -> Result<FFElem> {
    let field = c.field.clone();
    let big = field.order() - 1;
    let t_size = gcd_u128(k * c_order, big);
    // deterministic generator of the torsion subgroup
    let mut gen = None;
    for idx in 1..field.order() {
        let y = field.elem_at(idx).pow(big / t_size);
        if y.is_zero() {
            continue;
        }
        if prime_factors(t_size)
            .iter()
            .all(|&r| y.pow(t_size / r) != field.one())
        {
            gen = Some(y);
            break;
        }
    }
    let gen = gen.ok_or_else(|| Error::SearchFailed("torsion generator not found".into()))?;
    // discrete log of c inside the (small) torsion subgroup
    let mut z = None;
    let mut acc = field.one();
    for i in 0..t_size {
        if acc == *c {
            z = Some(i);
            break;
        }
        acc = acc.mul(&gen);
    }
    let z = z.ok_or_else(|| Error::SearchFailed("target outside torsion subgroup".into()))?;
    // solve k a = z (mod t_size)
    let g0 = gcd_u128(k % t_size, t_size);
    if z % g0 != 0 {
        return Err(Error::SearchFailed("no root in working field".into()));
    }
    let m2 = t_size / g0;
    let inv = mod_inv_u128((k % t_size) / g0 % m2, m2)
        .ok_or_else(|| Error::SearchFailed("no modular inverse".into()))?;
    Ok(gen.pow(z / g0 % m2 * inv % m2))
}

/// Constructs the basis element `e` of the rank-1 module with
/// `phi(e) = lambda . e` by unramified descent, and verifies its defining
/// properties against the semilinear fixed space.
///
/// The components satisfy the Galois-fixedness recursion
/// `e_c = lambda^{-q^c} (e_{c-1})^q` seeded with `e_0 = x beta`; closing
/// the recursion around the loop forces `beta^{q^n-1} = lambda^n`.
pub fn unramified_descent(
    lam: &FFElem,
    n: usize,
    q: u64,
) -> Result<(DescentData, Report)> {
    if lam.is_zero() {
        return Err(Error::ZeroLambda);
    }
    if n == 0 {
        return Err(Error::Invalid("n must be positive".into()));
    }
    let p = smallest_prime_factor(q);
    let f = log_base(q, p);
    let kn_field = FiniteField::get(p, f * n);
    let lam_n = embed(lam, &kn_field)?;
    let c = lam_n.pow(n as u128);
    let c_order = c.mult_order();
    let qn = (q as u128).pow(n as u32);
    // smallest k with ord(lambda^n) | (q^{kn}-1)/(q^n-1), i.e. with a root
    // beta in F_{q^{kn}}; the geometric sum is evaluated mod ord
    let mut ext_index = None;
    let mut geo = 0u128;
    let mut pw = 1u128;
    for k in 1..=26usize {
        geo = (geo + pw) % c_order;
        pw = pw * (qn % c_order) % c_order;
        let bits = (f * k * n) as f64 * (p as f64).log2();
        if bits > 126.0 {
            break;
        }
        if geo == 0 {
            ext_index = Some(k);
            break;
        }
    }
    let Some(k) = ext_index else {
        return Err(Error::SearchFailed(format!(
            "no admissible extension for lambda of order {c_order}"
        )));
    };
    let fprime = FiniteField::get(p, f * k * n);
    let c_e = embed(&c, &fprime)?;
    let beta = small_torsion_root(&c_e, qn - 1, c_order)?;
    debug_assert_eq!(beta.pow(qn - 1), c_e);
    let x = embed(&normal_basis_element(n, q), &fprime)?;
    let lam_e = embed(&lam_n, &fprime)?;
    let lam_inv = lam_e.inv()?;

    // e_0 = x beta, e_c = lambda^{-q^c} (e_{c-1})^q
    let mut e = Vec::with_capacity(n);
    e.push(x.mul(&beta));
    for cidx in 1..n {
        let prev = e[cidx - 1].pow(q as u128);
        e.push(lam_inv.frobenius_power(cidx as i64, q).mul(&prev));
    }

    let params = json!({ "n": n, "q": q, "ext_index": k });
    // Galois-fixedness around the loop
    if lam_inv.mul(&e[n - 1].pow(q as u128)) != e[0] {
        return Ok((
            DescentData { field: fprime, ext_index: k, beta, x, e },
            Report::failure("unramified_descent", params, "recursion does not close".into()),
        ));
    }
    if e.iter().any(|v| v.is_zero()) {
        return Ok((
            DescentData { field: fprime, ext_index: k, beta, x, e },
            Report::failure("unramified_descent", params, "e vanishes".into()),
        ));
    }
    // module Frobenius: (e_{c-1})^q = lambda^{q^c} e_c componentwise
    for cidx in 0..n {
        let lhs = e[(cidx + n - 1) % n].pow(q as u128);
        let rhs = lam_e.frobenius_power(cidx as i64, q).mul(&e[cidx]);
        if lhs != rhs {
            return Ok((
                DescentData { field: fprime, ext_index: k, beta, x, e },
                Report::failure(
                    "unramified_descent",
                    params,
                    format!("phi(e) != lambda e at component {cidx}"),
                ),
            ));
        }
    }
    // cross-check against the semilinear fixed space of the Galois
    // operator w_c = lambda^{-q^c} (w_{c-1})^q: every basis vector must be
    // a twisted F_{q^n}-multiple of e
    let mut mat = vec![vec![fprime.zero(); n]; n];
    for (cidx, row) in mat.iter_mut().enumerate() {
        row[(cidx + n - 1) % n] = lam_inv.frobenius_power(cidx as i64, q);
    }
    let basis = semilinear_fixed_basis(&mat, q)?;
    for b in &basis {
        let a0 = b[0].mul(&e[0].inv()?);
        let in_kn = a0.frobenius_power(n as i64, q) == a0;
        let multiple = (0..n).all(|cidx| {
            b[cidx] == a0.frobenius_power(cidx as i64, q).mul(&e[cidx])
        });
        if !(in_kn && multiple) {
            return Ok((
                DescentData { field: fprime, ext_index: k, beta, x, e },
                Report::failure(
                    "unramified_descent",
                    params,
                    "fixed-space basis vector is not a twisted multiple of e".into(),
                ),
            ));
        }
    }
    Ok((
        DescentData { field: fprime, ext_index: k, beta, x, e },
        Report::success("unramified_descent", params),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffield::solve_root_of_sign;
    use crate::lubin_tate::gamma_series;

    fn q2() -> Arc<LocalFieldSpec> {
        LocalFieldSpec::unramified(2, 1).unwrap()
    }

    fn q3() -> Arc<LocalFieldSpec> {
        LocalFieldSpec::unramified(3, 1).unwrap()
    }

    #[test]
    fn lift_examples() {
        let ring = TameRing::new(&q2(), &PhiSpec::Default, 2).unwrap();
        assert_eq!(ring.ramification_degree(), 3);
        let f2 = q2().residue_field().clone();
        let fp = ring.coeff_field().clone();
        let t = TSeries::monomial(&f2, f2.one(), 1);
        assert!(ring
            .lift_to_y(&t)
            .unwrap()
            .eq_mod(&TSeries::monomial(&fp, fp.one(), 3), 10));
        let one = TSeries::one(&f2);
        assert!(ring.lift_to_y(&one).unwrap().eq_mod(&TSeries::one(&fp), 10));
        // t^{-1}(1+t) -> y^{-3}(1+y^3)
        let lau = TSeries::poly(&f2, -1, vec![f2.one(), f2.one()]);
        let lifted = ring.lift_to_y(&lau).unwrap();
        let expect = TSeries::poly(&fp, -3, vec![fp.one(), fp.zero(), fp.zero(), fp.one()]);
        assert!(lifted.eq_mod(&expect, 10));
    }

    #[test]
    fn identity_element_acts_trivially() {
        let ring = TameRing::new(&q2(), &PhiSpec::Default, 2).unwrap();
        let g = InertiaElem {
            u: UnitValue::Int(1),
            zeta: ring.compatible_zeta(&UnitValue::Int(1)).unwrap(),
        };
        // compatible_zeta(1) returns the first cube root of 1, which is 1
        assert!(g.zeta == g.zeta.field.one());
        let img = ring.image_of_y(&g, 24).unwrap();
        assert!(img.eq_mod(&ring.y(), 24));
    }

    #[test]
    fn teichmuller_collapse() {
        // q = 3, n = 2, d = 4: Teichmuller unit tau(2) acts on y by the
        // exact monomial zeta^3 y
        let s = q3();
        let ring = TameRing::new(&s, &PhiSpec::Default, 2).unwrap();
        let u = UnitValue::Digits(vec![s.residue_field().from_int(2)]);
        let zeta = ring.compatible_zeta(&u).unwrap();
        let g = InertiaElem { u, zeta: zeta.clone() };
        let img = ring.image_of_y(&g, 24).unwrap();
        let fp = ring.coeff_field().clone();
        let ze = embed(&zeta, &fp).unwrap().pow(3);
        assert!(img.eq_mod(&TSeries::monomial(&fp, ze, 1), 24));
    }

    #[test]
    fn image_dth_power_is_gamma_series() {
        for (s, n) in [(q2(), 2usize), (q3(), 2)] {
            let ring = TameRing::new(&s, &PhiSpec::Default, n).unwrap();
            let d = ring.ramification_degree();
            let u = UnitValue::Int(1 + s.p as i64);
            let g = InertiaElem {
                u: u.clone(),
                zeta: ring.compatible_zeta(&u).unwrap(),
            };
            let ny = 40;
            let img = ring.image_of_y(&g, ny).unwrap();
            let powed = img.pow_i(d).unwrap();
            let gs = ring
                .lift_to_y(&gamma_series(&s, &u, &PhiSpec::Default, ny / d + 2).unwrap())
                .unwrap();
            let depth = ny.min(powed.prec()).min(gs.prec());
            assert!(depth >= d, "depth {depth}");
            assert!(powed.eq_mod(&gs, depth));
        }
    }

    #[test]
    fn group_law_holds() {
        let s = q2();
        let ring = TameRing::new(&s, &PhiSpec::Default, 2).unwrap();
        let f4 = ring.compatible_zeta(&UnitValue::Int(3)).unwrap().field.clone();
        let z1 = f4.gen();
        let z2 = z1.mul(&z1);
        let g1 = InertiaElem { u: UnitValue::Int(3), zeta: z1 };
        let g2 = InertiaElem { u: UnitValue::Int(5), zeta: z2 };
        let r = ring.check_action_group_law(&g1, &g2, 48).unwrap();
        assert!(r.ok, "{:?}", r.first_failure);
        // identity second factor
        let gid = InertiaElem {
            u: UnitValue::Int(1),
            zeta: ring.compatible_zeta(&UnitValue::Int(1)).unwrap(),
        };
        let r = ring.check_action_group_law(&g1, &gid, 32).unwrap();
        assert!(r.ok);
        // incompatible zeta is rejected
        let bad = InertiaElem { u: UnitValue::Int(3), zeta: f4.zero() };
        assert!(matches!(
            ring.check_action_group_law(&bad, &g2, 16),
            Err(Error::IncompatiblePair)
        ));
    }

    #[test]
    fn vj_shape_matches_proof_display() {
        let s = q2();
        let ring = TameRing::new(&s, &PhiSpec::Default, 2).unwrap();
        let m = PhiGammaModule::construct_ind(1, 2, 32, &s, &PhiSpec::Default).unwrap();
        let alpha = solve_root_of_sign(2, 2);
        let vs = ring.build_vj(&m, &alpha, 1).unwrap();
        let fp = ring.coeff_field().clone();
        let ae = embed(&alpha, &fp).unwrap();
        // v_0 = (alpha y, 0)e_0 + (0, alpha^2 y^2)e_1
        assert!(vs[0].entries[0][0].eq_mod(&TSeries::monomial(&fp, ae.clone(), 1), 10));
        assert!(vs[0].entries[1][0].is_zero());
        assert!(vs[0].entries[1][1].eq_mod(&TSeries::monomial(&fp, ae.pow(2), 2), 10));
        assert!(vs[0].entries[0][1].is_zero());
        // v_1 is the component rotation of v_0
        assert!(vs[1].entries[1][0].eq_mod(&vs[0].entries[0][0], 10));
        assert!(vs[1].entries[0][1].eq_mod(&vs[0].entries[1][1], 10));
    }

    #[test]
    fn phi_fixes_proof_vectors() {
        for (s, n, h) in [(q2(), 2usize, 1i64), (q3(), 2, 1), (q2(), 3, 1)] {
            let ring = TameRing::new(&s, &PhiSpec::Default, n).unwrap();
            let m = PhiGammaModule::construct_ind(h, n, 48, &s, &PhiSpec::Default).unwrap();
            let alpha = solve_root_of_sign(n, s.q());
            let vs = ring.build_vj(&m, &alpha, h).unwrap();
            for v in &vs {
                let r = ring.check_phi_fixed(&m, v, 48).unwrap();
                assert!(r.ok, "q={} n={n}: {:?}", s.q(), r.first_failure);
            }
        }
    }

    #[test]
    fn corrupted_alpha_detected() {
        // over F_3 the sign is -1 and alpha = 1 violates the sign equation
        let s = q3();
        let ring = TameRing::new(&s, &PhiSpec::Default, 2).unwrap();
        let m = PhiGammaModule::construct_ind(1, 2, 32, &s, &PhiSpec::Default).unwrap();
        let bad = ring.coeff_field().one();
        let vs = ring.build_vj(&m, &bad, 1).unwrap();
        let r = ring.check_phi_fixed(&m, &vs[0], 32).unwrap();
        assert!(!r.ok);
    }

    #[test]
    fn inertia_eigenvalues() {
        let s = q2();
        let n = 2;
        let h = 1;
        let ring = TameRing::new(&s, &PhiSpec::Default, n).unwrap();
        let m = PhiGammaModule::construct_ind(h, n, 64, &s, &PhiSpec::Default).unwrap();
        let alpha = solve_root_of_sign(n, s.q());
        let vs = ring.build_vj(&m, &alpha, h).unwrap();
        let u = UnitValue::Int(3);
        let g = InertiaElem {
            u: u.clone(),
            zeta: ring.compatible_zeta(&u).unwrap(),
        };
        for (j, v) in vs.iter().enumerate() {
            let r = ring.check_inertia_eigen(&m, v, j, h, &g, 48).unwrap();
            assert!(r.ok, "j={j}: {:?}", r.first_failure);
        }
        // identity element: eigenvalue 1
        let gid = InertiaElem {
            u: UnitValue::Int(1),
            zeta: ring.compatible_zeta(&UnitValue::Int(1)).unwrap(),
        };
        let r = ring.check_inertia_eigen(&m, &vs[0], 0, h, &gid, 32).unwrap();
        assert!(r.ok);
        // the eigenvalue identity holds for every compatible zeta, so the
        // detectable corruption is an incompatible pair: over Q_3 with
        // ubar = 2, a fourth root of unity fails zeta^d = ubar
        let s3 = q3();
        let ring3 = TameRing::new(&s3, &PhiSpec::Default, 2).unwrap();
        let m3 = PhiGammaModule::construct_ind(1, 2, 32, &s3, &PhiSpec::Default).unwrap();
        let a3 = solve_root_of_sign(2, 3);
        let v3 = ring3.build_vj(&m3, &a3, 1).unwrap();
        let good = ring3.compatible_zeta(&UnitValue::Int(2)).unwrap();
        let f9 = good.field.clone();
        let bad = InertiaElem { u: UnitValue::Int(2), zeta: f9.one() };
        assert!(matches!(
            ring3.check_inertia_eigen(&m3, &v3[0], 0, 1, &bad, 24),
            Err(Error::IncompatiblePair)
        ));
    }

    #[test]
    fn teichmuller_eigenvalue_is_exact() {
        // pure monomial bookkeeping: no series tails at all
        let s = q3();
        let n = 2;
        let h = 1;
        let ring = TameRing::new(&s, &PhiSpec::Default, n).unwrap();
        let m = PhiGammaModule::construct_ind(h, n, 32, &s, &PhiSpec::Default).unwrap();
        let alpha = solve_root_of_sign(n, s.q());
        let vs = ring.build_vj(&m, &alpha, h).unwrap();
        let u = UnitValue::Digits(vec![s.residue_field().from_int(2)]);
        let g = InertiaElem {
            u: u.clone(),
            zeta: ring.compatible_zeta(&u).unwrap(),
        };
        for (j, v) in vs.iter().enumerate() {
            let r = ring.check_inertia_eigen(&m, v, j, h, &g, 24).unwrap();
            assert!(r.ok, "j={j}: {:?}", r.first_failure);
        }
    }

    #[test]
    fn descent_trivial_character() {
        let f3 = FiniteField::get(3, 1);
        let (data, report) = unramified_descent(&f3.one(), 2, 3).unwrap();
        assert!(report.ok, "{:?}", report.first_failure);
        assert_eq!(data.ext_index, 1);
        // phi(e) = e componentwise
        assert_eq!(data.e[1].pow(3), data.e[0]);
    }

    #[test]
    fn descent_generator_lambda_needs_f64() {
        // q = 2, n = 2, lambda a generator of F_4: beta^3 = lambda^2 has
        // no solution below F_{2^6}
        let f4 = FiniteField::get(2, 2);
        let lam = f4.gen();
        assert_eq!(lam.mult_order(), 3);
        let (data, report) = unramified_descent(&lam, 2, 2).unwrap();
        assert!(report.ok, "{:?}", report.first_failure);
        assert_eq!(data.ext_index, 3);
        assert_eq!(data.field.m, 6);
    }

    #[test]
    fn descent_rank_one() {
        // n = 1: reduces to beta^{q-1} = lambda
        let f3 = FiniteField::get(3, 1);
        let lam = f3.from_int(2);
        let (data, report) = unramified_descent(&lam, 1, 3).unwrap();
        assert!(report.ok, "{:?}", report.first_failure);
        let lam_e = embed(&lam, &data.field).unwrap();
        assert_eq!(data.beta.pow(2), lam_e);
        assert_eq!(data.e[0].pow(3), lam_e.mul(&data.e[0]));
    }

    #[test]
    fn descent_exhaustive_small() {
        // every lambda in F_4^x and F_9^x
        for (p, f_deg, n, q) in [(2u64, 2usize, 2usize, 2u64), (3, 2, 2, 3), (2, 3, 3, 2)] {
            let kn = FiniteField::get(p, f_deg);
            for idx in 1..kn.order() {
                let lam = kn.elem_at(idx);
                let (_, report) = unramified_descent(&lam, n, q).unwrap();
                assert!(
                    report.ok,
                    "q={q} n={n} lambda #{idx}: {:?}",
                    report.first_failure
                );
            }
        }
    }

    #[test]
    fn descent_rejects_zero() {
        let f4 = FiniteField::get(2, 2);
        assert!(matches!(
            unramified_descent(&f4.zero(), 2, 2),
            Err(Error::ZeroLambda)
        ));
    }
}
