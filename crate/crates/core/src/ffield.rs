//! Finite fields `F_{p^m}` with deterministically chosen moduli.
//!
//! Every degree has one canonical model: the modulus is the first monic
//! irreducible polynomial of that degree when coefficient vectors
//! `(c_0, ..., c_{m-1})` are enumerated as base-p digits of an increasing
//! integer (`c_0` least significant). Relative extensions are handled
//! through [`embed`], which maps the source generator to the first root of
//! the source modulus inside the target field.

use crate::error::{Error, Result};
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

// ---------------------------------------------------------------------------
// dense polynomial arithmetic over F_p
// ---------------------------------------------------------------------------

pub(crate) fn poly_trim(a: &mut Vec<u64>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

pub(crate) fn poly_sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut r = vec![0u64; a.len().max(b.len())];
    for (i, slot) in r.iter_mut().enumerate() {
        let x = *a.get(i).unwrap_or(&0) + p - *b.get(i).unwrap_or(&0) % p;
        *slot = x % p;
    }
    poly_trim(&mut r);
    r
}

pub(crate) fn poly_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut r = vec![0u64; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            r[i + j] = (r[i + j] + ai * bj) % p;
        }
    }
    poly_trim(&mut r);
    r
}

/// Remainder modulo a monic polynomial.
pub(crate) fn poly_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    debug_assert_eq!(*m.last().unwrap(), 1);
    let mut r = a.to_vec();
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        if lead != 0 {
            for (i, &mi) in m.iter().enumerate() {
                let idx = shift + i;
                r[idx] = (r[idx] + (p - (lead * mi) % p)) % p;
            }
        }
        r.pop();
        poly_trim(&mut r);
        if r.len() <= dm {
            break;
        }
    }
    poly_trim(&mut r);
    r
}

fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let (mut a, mut b) = (a.to_vec(), b.to_vec());
    while !b.is_empty() {
        // make b monic for poly_rem
        let lead = *b.last().unwrap();
        let inv = mod_inv(lead, p);
        let monic: Vec<u64> = b.iter().map(|&c| c * inv % p).collect();
        let r = poly_rem(&a, &monic, p);
        a = b;
        b = r;
    }
    a
}

fn mod_inv(a: u64, p: u64) -> u64 {
    // p is a small prime
    let mut r = 1u64;
    let mut base = a % p;
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

/// One application of the p-power Frobenius in F_p[x]/(m).
fn poly_frob(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut result = vec![1u64];
    let mut base = a.to_vec();
    let mut e = p;
    while e > 0 {
        if e & 1 == 1 {
            result = poly_rem(&poly_mul(&result, &base, p), m, p);
        }
        base = poly_rem(&poly_mul(&base, &base, p), m, p);
        e >>= 1;
    }
    result
}

fn is_irreducible(f: &[u64], p: u64) -> bool {
    let m = f.len() - 1;
    if m == 0 {
        return false;
    }
    let x = vec![0, 1];
    // x^(p^m) == x and gcd(x^(p^(m/r)) - x, f) == 1 for prime r | m
    let mut t = poly_rem(&x, f, p);
    let mut frob_steps: Vec<Vec<u64>> = Vec::with_capacity(m);
    for _ in 0..m {
        t = poly_frob(&t, f, p);
        frob_steps.push(t.clone());
    }
    if frob_steps[m - 1] != poly_rem(&x, f, p) {
        return false;
    }
    let mut r = 2;
    let mut mm = m;
    let mut primes = vec![];
    while r * r <= mm {
        if mm % r == 0 {
            primes.push(r);
            while mm % r == 0 {
                mm /= r;
            }
        }
        r += 1;
    }
    if mm > 1 {
        primes.push(mm);
    }
    for r in primes {
        let s = &frob_steps[m / r - 1];
        let d = poly_sub(s, &poly_rem(&x, f, p), p);
        let g = poly_gcd(f, &d, p);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

/// The canonical irreducible polynomial of degree `m` over `F_p`.
pub fn irreducible_poly(p: u64, m: usize) -> Vec<u64> {
    if m == 1 {
        return vec![0, 1]; // x
    }
    let mut idx: u128 = 0;
    loop {
        let mut f = vec![0u64; m + 1];
        f[m] = 1;
        let mut k = idx;
        for c in f.iter_mut().take(m) {
            *c = (k % p as u128) as u64;
            k /= p as u128;
        }
        if k == 0 && is_irreducible(&f, p) {
            return f;
        }
        idx += 1;
    }
}

// ---------------------------------------------------------------------------
// fields and elements
// ---------------------------------------------------------------------------

/// The field `F_{p^m}` with the canonical modulus.
#[derive(Debug, Hash)]
pub struct FiniteField {
    pub p: u64,
    pub m: usize,
    pub modulus: Vec<u64>,
}

impl PartialEq for FiniteField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.m == other.m
    }
}
impl Eq for FiniteField {}

static FIELD_CACHE: OnceLock<Mutex<HashMap<(u64, usize), Arc<FiniteField>>>> = OnceLock::new();

impl FiniteField {
    pub fn get(p: u64, m: usize) -> Arc<FiniteField> {
        assert!(m >= 1, "field degree must be positive");
        let cache = FIELD_CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut map = cache.lock().unwrap();
        map.entry((p, m))
            .or_insert_with(|| {
                Arc::new(FiniteField {
                    p,
                    m,
                    modulus: irreducible_poly(p, m),
                })
            })
            .clone()
    }

    pub fn order(&self) -> u128 {
        (self.p as u128).pow(self.m as u32)
    }

    pub fn zero(self: &Arc<Self>) -> FFElem {
        FFElem {
            field: self.clone(),
            c: vec![0; self.m],
        }
    }

    pub fn one(self: &Arc<Self>) -> FFElem {
        self.from_int(1)
    }

    pub fn from_int(self: &Arc<Self>, v: i64) -> FFElem {
        let p = self.p as i64;
        let mut c = vec![0u64; self.m];
        c[0] = v.rem_euclid(p) as u64;
        FFElem {
            field: self.clone(),
            c,
        }
    }

    /// Element with the given coefficient vector (lowest degree first).
    pub fn elem(self: &Arc<Self>, coeffs: &[u64]) -> FFElem {
        assert!(coeffs.len() <= self.m);
        let mut c: Vec<u64> = coeffs.iter().map(|&x| x % self.p).collect();
        c.resize(self.m, 0);
        FFElem {
            field: self.clone(),
            c,
        }
    }

    /// The element at position `idx` in the enumeration order used for all
    /// deterministic searches.
    pub fn elem_at(self: &Arc<Self>, mut idx: u128) -> FFElem {
        let mut c = vec![0u64; self.m];
        for slot in c.iter_mut() {
            *slot = (idx % self.p as u128) as u64;
            idx /= self.p as u128;
        }
        assert_eq!(idx, 0);
        FFElem {
            field: self.clone(),
            c,
        }
    }

    /// The class of x, a generator of the field over F_p (not necessarily of
    /// the unit group).
    pub fn gen(self: &Arc<Self>) -> FFElem {
        if self.m == 1 {
            return self.one();
        }
        self.elem(&[0, 1])
    }
}

/// An element of a [`FiniteField`], stored as a coefficient vector over F_p.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FFElem {
    pub field: Arc<FiniteField>,
    c: Vec<u64>,
}

impl fmt::Debug for FFElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FF{:?}/{}^{}", self.c, self.field.p, self.field.m)
    }
}

impl FFElem {
    pub fn coeffs(&self) -> &[u64] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&x| x == 0)
    }

    fn same_field(&self, other: &FFElem) {
        assert_eq!(self.field, other.field, "finite field mismatch");
    }

    pub fn add(&self, other: &FFElem) -> FFElem {
        self.same_field(other);
        let p = self.field.p;
        let c = self
            .c
            .iter()
            .zip(&other.c)
            .map(|(a, b)| (a + b) % p)
            .collect();
        FFElem {
            field: self.field.clone(),
            c,
        }
    }

    pub fn sub(&self, other: &FFElem) -> FFElem {
        self.same_field(other);
        let p = self.field.p;
        let c = self
            .c
            .iter()
            .zip(&other.c)
            .map(|(a, b)| (a + p - b) % p)
            .collect();
        FFElem {
            field: self.field.clone(),
            c,
        }
    }

    pub fn neg(&self) -> FFElem {
        let p = self.field.p;
        let c = self.c.iter().map(|a| (p - a) % p).collect();
        FFElem {
            field: self.field.clone(),
            c,
        }
    }

    pub fn mul(&self, other: &FFElem) -> FFElem {
        self.same_field(other);
        let p = self.field.p;
        let mut r = poly_rem(&poly_mul(&self.c, &other.c, p), &self.field.modulus, p);
        r.resize(self.field.m, 0);
        FFElem {
            field: self.field.clone(),
            c: r,
        }
    }

    pub fn pow(&self, mut e: u128) -> FFElem {
        let mut result = self.field.one();
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        result
    }

    /// Integer power, negative exponents through inversion.
    pub fn pow_i(&self, e: i64) -> Result<FFElem> {
        if e >= 0 {
            Ok(self.pow(e as u128))
        } else {
            Ok(self.inv()?.pow((-e) as u128))
        }
    }

    pub fn inv(&self) -> Result<FFElem> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.pow(self.field.order() - 2))
    }

    /// `x^(q^j)` where `q` is a power of the characteristic.
    pub fn frobenius_power(&self, j: i64, q: u64) -> FFElem {
        let p = self.field.p;
        let f = log_base(q, p);
        let m = self.field.m as i64;
        let steps = ((f as i64 * j) % m + m) % m;
        let mut r = self.c.clone();
        for _ in 0..steps {
            r = poly_frob(&r, &self.field.modulus, p);
            r.resize(self.field.m, 0);
        }
        FFElem {
            field: self.field.clone(),
            c: r,
        }
    }

    /// Multiplicative order; the element must be nonzero.
    pub fn mult_order(&self) -> u128 {
        assert!(!self.is_zero());
        let mut ord = self.field.order() - 1;
        for (l, _) in factorize(ord) {
            while ord % l == 0 && self.pow(ord / l) == self.field.one() {
                ord /= l;
            }
        }
        ord
    }
}

/// `f` with `q = p^f`; panics if q is not a power of p.
pub fn log_base(q: u64, p: u64) -> usize {
    let mut f = 0;
    let mut v = 1u64;
    while v < q {
        v *= p;
        f += 1;
    }
    assert_eq!(v, q, "{q} is not a power of {p}");
    f.max(1)
}

// ---------------------------------------------------------------------------
// embeddings
// ---------------------------------------------------------------------------

static EMBED_CACHE: OnceLock<Mutex<HashMap<(u64, usize, usize), Vec<u64>>>> = OnceLock::new();

/// Ring embedding into a target field whose degree is a multiple of the
/// source degree. The image of the source generator is the first root of the
/// source modulus in enumeration order, restricted to the subfield of the
/// right degree.
pub fn embed(x: &FFElem, target: &Arc<FiniteField>) -> Result<FFElem> {
    let src = &x.field;
    if **src == **target {
        return Ok(x.clone());
    }
    if src.p != target.p || target.m % src.m != 0 {
        return Err(Error::NoEmbedding(src.m, target.m));
    }
    let theta_c = {
        let cache = EMBED_CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let key = (src.p, src.m, target.m);
        let cached = cache.lock().unwrap().get(&key).cloned();
        match cached {
            Some(c) => c,
            None => {
                let c = find_generator_image(src, target)?;
                cache.lock().unwrap().insert(key, c.clone());
                c
            }
        }
    };
    let theta = FFElem {
        field: target.clone(),
        c: theta_c,
    };
    // evaluate x's coefficient polynomial at theta
    let mut acc = target.zero();
    for &coef in x.c.iter().rev() {
        acc = acc.mul(&theta).add(&target.from_int(coef as i64));
    }
    Ok(acc)
}

fn find_generator_image(src: &Arc<FiniteField>, target: &Arc<FiniteField>) -> Result<Vec<u64>> {
    let p = target.p;
    let a = src.m;
    // F_p-basis of the degree-a subfield: kernel of z -> z^(p^a) - z
    let dim = target.m;
    let mut cols: Vec<Vec<u64>> = Vec::with_capacity(dim);
    for i in 0..dim {
        let mut e = vec![0u64; dim];
        e[i] = 1;
        let mut z = e.clone();
        for _ in 0..a {
            z = poly_frob(&z, &target.modulus, p);
        }
        z.resize(dim, 0);
        let col: Vec<u64> = (0..dim).map(|r| (z[r] + p - e[r]) % p).collect();
        cols.push(col);
    }
    let mat: Vec<Vec<u64>> = (0..dim).map(|r| (0..dim).map(|c| cols[c][r]).collect()).collect();
    let basis = nullspace_mod_p(&mat, p);
    debug_assert_eq!(basis.len(), a);
    let count = (p as u128).checked_pow(a as u32).expect("subfield too large");
    assert!(count <= 1 << 24, "embedding search space too large");
    for idx in 0..count {
        let mut cand = vec![0u64; dim];
        let mut k = idx;
        for b in &basis {
            let d = (k % p as u128) as u64;
            k /= p as u128;
            if d != 0 {
                for (slot, &bi) in cand.iter_mut().zip(b) {
                    *slot = (*slot + d * bi) % p;
                }
            }
        }
        let cand_el = FFElem {
            field: target.clone(),
            c: cand.clone(),
        };
        // evaluate the source modulus at the candidate
        let mut acc = target.zero();
        for &coef in src.modulus.iter().rev() {
            acc = acc.mul(&cand_el).add(&target.from_int(coef as i64));
        }
        if acc.is_zero() {
            return Ok(cand);
        }
    }
    Err(Error::NoEmbedding(src.m, target.m))
}

/// Basis of the right kernel of `mat` over F_p (row-major, n x n).
pub(crate) fn nullspace_mod_p(mat: &[Vec<u64>], p: u64) -> Vec<Vec<u64>> {
    let rows = mat.len();
    let cols = if rows == 0 { 0 } else { mat[0].len() };
    let mut a: Vec<Vec<u64>> = mat.to_vec();
    let mut pivot_col_of_row = vec![];
    let mut r = 0;
    for c in 0..cols {
        let mut piv = None;
        for i in r..rows {
            if a[i][c] != 0 {
                piv = Some(i);
                break;
            }
        }
        let Some(piv) = piv else { continue };
        a.swap(r, piv);
        let inv = mod_inv(a[r][c], p);
        for j in 0..cols {
            a[r][j] = a[r][j] * inv % p;
        }
        for i in 0..rows {
            if i != r && a[i][c] != 0 {
                let f = a[i][c];
                for j in 0..cols {
                    a[i][j] = (a[i][j] + (p - f) * a[r][j]) % p;
                }
            }
        }
        pivot_col_of_row.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    let pivot_cols: Vec<usize> = pivot_col_of_row.clone();
    let mut basis = vec![];
    for c in 0..cols {
        if pivot_cols.contains(&c) {
            continue;
        }
        let mut v = vec![0u64; cols];
        v[c] = 1;
        for (row, &pc) in pivot_cols.iter().enumerate() {
            v[pc] = (p - a[row][c]) % p;
        }
        basis.push(v);
    }
    basis
}

// ---------------------------------------------------------------------------
// deterministic searches from the construction proofs
// ---------------------------------------------------------------------------

/// Sign root: alpha with `alpha^(q^n - 1) = (-1)^(n-1)`.
///
/// Lives in `F_{q^n}` when the sign is +1 in `F_p`, otherwise in
/// `F_{q^{2n}}`.
pub fn solve_root_of_sign(n: usize, q: u64) -> FFElem {
    let p = smallest_prime_factor(q);
    let f = log_base(q, p);
    let sign_positive = p == 2 || n % 2 == 1;
    if sign_positive {
        return FiniteField::get(p, f * n).one();
    }
    let field = FiniteField::get(p, f * 2 * n);
    let exp = (q as u128).pow(n as u32) - 1;
    let minus_one = field.from_int(-1);
    if field.order() <= 1 << 16 {
        // smallest alpha in enumeration order
        for idx in 1..field.order() {
            let cand = field.elem_at(idx);
            if cand.pow(exp) == minus_one {
                return cand;
            }
        }
        unreachable!("sign root always exists in F_{{q^{{2n}}}}");
    }
    root_with_exponent(&minus_one, exp).expect("sign root always exists in F_{q^{2n}}")
}

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

/// First element of `F_{q^n}` (in enumeration order) whose Frobenius
/// conjugates over `F_q` are linearly independent.
pub fn normal_basis_element(n: usize, q: u64) -> FFElem {
    let p = smallest_prime_factor(q);
    let f = log_base(q, p);
    let field = FiniteField::get(p, f * n);
    let qbase = FiniteField::get(p, f);
    let qgen_im = embed(&qbase.gen(), &field).expect("subfield embeds");
    for idx in 1..field.order() {
        let x = field.elem_at(idx);
        // F_q-independence of the n conjugates == F_p-independence of the
        // n*f products (F_q-basis element) * conjugate
        let mut rows = vec![];
        for j in 0..n {
            let conj = x.frobenius_power(j as i64, q);
            let mut scaled = field.one();
            for _ in 0..f {
                rows.push(conj.mul(&scaled).coeffs().to_vec());
                scaled = scaled.mul(&qgen_im);
            }
        }
        if rank_mod_p(&rows, p) == n * f {
            return x;
        }
    }
    unreachable!("normal basis elements always exist");
}

pub(crate) fn rank_mod_p(rows: &[Vec<u64>], p: u64) -> usize {
    let mut a: Vec<Vec<u64>> = rows.to_vec();
    let cols = a.first().map(|r| r.len()).unwrap_or(0);
    let mut rank = 0;
    for c in 0..cols {
        let mut piv = None;
        for i in rank..a.len() {
            if a[i][c] != 0 {
                piv = Some(i);
                break;
            }
        }
        let Some(piv) = piv else { continue };
        a.swap(rank, piv);
        let inv = mod_inv(a[rank][c], p);
        for j in 0..cols {
            a[rank][j] = a[rank][j] * inv % p;
        }
        for i in 0..a.len() {
            if i != rank && a[i][c] != 0 {
                let fct = a[i][c];
                for j in 0..cols {
                    a[i][j] = (a[i][j] + (p - fct) * a[rank][j]) % p;
                }
            }
        }
        rank += 1;
        if rank == a.len() {
            break;
        }
    }
    rank
}

/// F_q-basis of `{ v : M sigma(v) = v }` where sigma is the coordinatewise
/// q-power Frobenius; solved by F_p-linearization. The space must have
/// F_q-dimension n, which holds over a large enough coefficient field.
pub fn semilinear_fixed_basis(mat: &[Vec<FFElem>], q: u64) -> Result<Vec<Vec<FFElem>>> {
    let n = mat.len();
    assert!(n > 0 && mat.iter().all(|r| r.len() == n));
    let field = mat[0][0].field.clone();
    let p = field.p;
    let f = log_base(q, p);
    if field_det(mat)?.is_zero() {
        return Err(Error::SingularMatrix);
    }
    let dim = n * field.m;
    // matrix of v -> M sigma(v) - v over F_p
    let mut cols: Vec<Vec<u64>> = Vec::with_capacity(dim);
    for comp in 0..n {
        for b in 0..field.m {
            let mut e = field.zero();
            e.c[b] = 1;
            let se = e.frobenius_power(1, q);
            let mut col = vec![0u64; dim];
            for (row, mrow) in mat.iter().enumerate() {
                let val = mrow[comp].mul(&se);
                for (k, &vc) in val.coeffs().iter().enumerate() {
                    col[row * field.m + k] = vc;
                }
            }
            // subtract identity
            let idx = comp * field.m + b;
            col[idx] = (col[idx] + p - 1) % p;
            cols.push(col);
        }
    }
    let a: Vec<Vec<u64>> = (0..dim).map(|r| (0..dim).map(|c| cols[c][r]).collect()).collect();
    let null = nullspace_mod_p(&a, p);
    // pick an F_q-basis among the F_p-basis vectors
    let qbase = FiniteField::get(p, f);
    let qgen_im = embed(&qbase.gen(), &field)?;
    let mut chosen: Vec<Vec<FFElem>> = vec![];
    let mut span_rows: Vec<Vec<u64>> = vec![];
    for v in &null {
        if chosen.len() == n {
            break;
        }
        let vecf: Vec<FFElem> = (0..n)
            .map(|i| field.elem(&v[i * field.m..(i + 1) * field.m]))
            .collect();
        let mut with = span_rows.clone();
        with.push(v.clone());
        if rank_mod_p(&with, p) > rank_mod_p(&span_rows, p) {
            // add all F_q-multiples of the new vector to the span
            let mut scaled = field.one();
            for _ in 0..f {
                let row: Vec<u64> = vecf
                    .iter()
                    .flat_map(|x| x.mul(&scaled).coeffs().to_vec())
                    .collect();
                span_rows.push(row);
                scaled = scaled.mul(&qgen_im);
            }
            chosen.push(vecf);
        }
    }
    if chosen.len() != n {
        return Err(Error::FixedSpaceDeficient {
            expected: n,
            found: chosen.len(),
        });
    }
    Ok(chosen)
}

fn field_det(mat: &[Vec<FFElem>]) -> Result<FFElem> {
    let n = mat.len();
    let field = mat[0][0].field.clone();
    let mut a: Vec<Vec<FFElem>> = mat.to_vec();
    let mut det = field.one();
    for c in 0..n {
        let mut piv = None;
        for r in c..n {
            if !a[r][c].is_zero() {
                piv = Some(r);
                break;
            }
        }
        let Some(piv) = piv else { return Ok(field.zero()) };
        if piv != c {
            a.swap(c, piv);
            det = det.neg();
        }
        det = det.mul(&a[c][c]);
        let inv = a[c][c].inv()?;
        for r in c + 1..n {
            if !a[r][c].is_zero() {
                let fct = a[r][c].mul(&inv);
                for j in c..n {
                    let s = a[c][j].mul(&fct);
                    a[r][j] = a[r][j].sub(&s);
                }
            }
        }
    }
    Ok(det)
}

// ---------------------------------------------------------------------------
// unit-group roots (used by the unramified descent)
// ---------------------------------------------------------------------------

pub(crate) fn factorize(mut x: u128) -> Vec<(u128, u32)> {
    assert!(x < 1 << 40, "unit group too large to factor by trial division");
    let mut out = vec![];
    let mut d: u128 = 2;
    while d * d <= x {
        if x % d == 0 {
            let mut e = 0;
            while x % d == 0 {
                x /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if x > 1 {
        out.push((x, 1));
    }
    out
}

/// First generator of the unit group in enumeration order.
fn lex_min_generator(field: &Arc<FiniteField>) -> FFElem {
    let order = field.order() - 1;
    let factors = factorize(order);
    'outer: for idx in 1..field.order() {
        let g = field.elem_at(idx);
        if g.is_zero() {
            continue;
        }
        for (l, _) in &factors {
            if g.pow(order / l) == field.one() {
                continue 'outer;
            }
        }
        return g;
    }
    unreachable!("finite field unit groups are cyclic");
}

fn bsgs(base: &FFElem, target: &FFElem, order: u128) -> Option<u128> {
    let m = (order as f64).sqrt().ceil() as u128 + 1;
    let mut table: HashMap<Vec<u64>, u128> = HashMap::new();
    let mut cur = base.field.one();
    for j in 0..m {
        table.entry(cur.coeffs().to_vec()).or_insert(j);
        cur = cur.mul(base);
    }
    let factor = base.pow(order - (m % order.max(1)) % order.max(1)); // base^{-m}
    let factor = if m % order == 0 { base.field.one() } else { factor };
    let mut gamma = target.clone();
    for i in 0..m {
        if let Some(&j) = table.get(gamma.coeffs()) {
            return Some((i * m + j) % order);
        }
        gamma = gamma.mul(&factor);
    }
    None
}

/// Discrete log by Pohlig-Hellman; `target` must lie in `<base>`.
fn dlog(base: &FFElem, target: &FFElem, order: u128) -> Option<u128> {
    let factors = factorize(order);
    let mut residues = vec![];
    let mut moduli = vec![];
    for (l, e) in factors {
        let le = l.pow(e);
        let g_l = base.pow(order / le);
        let t_l = target.pow(order / le);
        // digit-by-digit in the l^e subgroup
        let gamma = g_l.pow(le / l); // order l
        let mut x: u128 = 0;
        let mut cur = t_l;
        for k in 0..e {
            let h = cur.pow(le / l.pow(k + 1));
            let d = bsgs(&gamma, &h, l)?;
            x += d * l.pow(k);
            let adj = g_l.pow(le - (d * l.pow(k)) % le);
            cur = cur.mul(&adj);
        }
        residues.push(x);
        moduli.push(le);
    }
    // CRT
    let mut x: u128 = 0;
    let mut modulus: u128 = 1;
    for (r, m) in residues.into_iter().zip(moduli) {
        let (g, p_inv) = {
            // modulus and m are coprime
            let inv = mod_inv_u128(modulus % m, m)?;
            (1u128, inv)
        };
        debug_assert_eq!(g, 1);
        let diff = (r + m - x % m) % m;
        x += modulus * ((diff * p_inv) % m);
        modulus *= m;
    }
    Some(x % modulus)
}

fn mod_inv_u128(a: u128, m: u128) -> Option<u128> {
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u128)
}

/// Solve `beta^k = c` in the unit group of c's field, if possible.
pub fn root_with_exponent(c: &FFElem, k: u128) -> Result<FFElem> {
    if c.is_zero() {
        return Err(Error::DivisionByZero);
    }
    let field = c.field.clone();
    let order = field.order() - 1;
    let g = lex_min_generator(&field);
    let z = dlog(&g, c, order)
        .ok_or_else(|| Error::SearchFailed("discrete log failed".into()))?;
    let d = gcd_u128(k % order, order);
    if z % d != 0 {
        return Err(Error::SearchFailed(format!(
            "no {k}-th root in F_{}^{}",
            field.p, field.m
        )));
    }
    let m2 = order / d;
    let inv = mod_inv_u128((k % order) / d % m2, m2)
        .ok_or_else(|| Error::SearchFailed("no modular inverse".into()))?;
    let w = (z / d) % m2 * inv % m2;
    Ok(g.pow(w))
}

fn gcd_u128(a: u128, b: u128) -> u128 {
    if a == 0 {
        b
    } else {
        gcd_u128(b % a, a)
    }
}
