//! Python bindings: local field specs, (phi,Gamma)-modules, the
//! classification, the tame checks, and unramified descent.
//!
//! Structured values (matrices, series, reports) cross the boundary as
//! JSON strings; parse them with `json.loads` on the Python side.

use ltpg::ffield::{solve_root_of_sign, FiniteField};
use ltpg::lubin_tate::{parse_unit_expr, PhiSpec};
use ltpg::padic::LocalFieldSpec;
use ltpg::phigamma::{Mat, PhiGammaModule};
use ltpg::series::TSeries;
use ltpg::tame_ext::{InertiaElem, TameRing};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use std::sync::Arc;

fn err(e: ltpg::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A local field: residue characteristic `p`, residue degree `f`,
/// ramification index `e` with an optional Eisenstein polynomial.
#[pyclass(name = "Spec", frozen)]
struct PySpec {
    inner: Arc<LocalFieldSpec>,
}

#[pymethods]
impl PySpec {
    #[new]
    #[pyo3(signature = (p, f=1, e=1, eis=None))]
    fn new(p: u64, f: usize, e: usize, eis: Option<Vec<Vec<i64>>>) -> PyResult<Self> {
        Ok(PySpec {
            inner: LocalFieldSpec::new(p, f, e, eis).map_err(err)?,
        })
    }

    #[getter]
    fn p(&self) -> u64 {
        self.inner.p
    }

    #[getter]
    fn q(&self) -> u64 {
        self.inner.q()
    }

    fn fingerprint(&self) -> String {
        self.inner.fingerprint()
    }

    /// `[u](t) mod pi` as a JSON series.
    fn gamma_series(&self, unit: &str, prec: i64) -> PyResult<String> {
        let u = parse_unit_expr(unit, &self.inner, prec).map_err(err)?;
        let g = ltpg::lubin_tate::gamma_series(&self.inner, &u, &PhiSpec::Default, prec)
            .map_err(err)?;
        Ok(ltpg::json::tseries_to_json(&g).to_string())
    }

    /// The reduced cocycle 1-unit `fbar_u(t)` as a JSON series.
    fn fbar(&self, unit: &str, prec: i64) -> PyResult<String> {
        let u = parse_unit_expr(unit, &self.inner, prec).map_err(err)?;
        let f =
            ltpg::lubin_tate::fbar(&self.inner, &u, &PhiSpec::Default, prec).map_err(err)?;
        Ok(ltpg::json::tseries_to_json(&f).to_string())
    }

    fn __repr__(&self) -> String {
        format!("Spec({})", self.inner.fingerprint())
    }
}

fn lambda_elem(spec: &Arc<LocalFieldSpec>, lam: &[i64], n: usize) -> PyResult<ltpg::ffield::FFElem> {
    if lam.is_empty() {
        return Err(PyValueError::new_err("lambda must be nonempty"));
    }
    if lam.len() == 1 {
        return Ok(spec.residue_field().from_int(lam[0]));
    }
    let deg = spec.f * n;
    if lam.len() > deg {
        return Err(PyValueError::new_err("lambda has too many coefficients"));
    }
    let field = FiniteField::get(spec.p, deg);
    let gen = field.gen();
    let mut acc = field.zero();
    let mut pw = field.one();
    for c in lam {
        acc = acc.add(&field.from_int(*c).mul(&pw));
        pw = pw.mul(&gen);
    }
    Ok(acc)
}

/// An etale (phi,Gamma)-module with explicit phi- and gamma-matrices.
#[pyclass(name = "Module", frozen)]
struct PyPGModule {
    inner: PhiGammaModule,
    spec: Arc<LocalFieldSpec>,
}

#[pymethods]
impl PyPGModule {
    /// The induced module of the level-n fundamental character to the
    /// power h.
    #[staticmethod]
    fn ind(spec: &PySpec, h: i64, n: usize, prec: i64) -> PyResult<Self> {
        Ok(PyPGModule {
            inner: PhiGammaModule::construct_ind(h, n, prec, &spec.inner, &PhiSpec::Default)
                .map_err(err)?,
            spec: spec.inner.clone(),
        })
    }

    /// The rank-1 character module with gamma-exponent s and phi-scalar
    /// lambda (coefficients in powers of the field generator).
    #[staticmethod]
    fn char(spec: &PySpec, s: i64, lam: Vec<i64>, prec: i64) -> PyResult<Self> {
        let lam = lambda_elem(&spec.inner, &lam, 1)?;
        Ok(PyPGModule {
            inner: PhiGammaModule::construct_char(s, &lam, prec, &spec.inner, &PhiSpec::Default)
                .map_err(err)?,
            spec: spec.inner.clone(),
        })
    }

    /// The general irreducible class: ind(h) twisted by t^s and the
    /// unramified character of lambda.
    #[staticmethod]
    fn twisted(spec: &PySpec, h: i64, s: i64, lam: Vec<i64>, n: usize, prec: i64) -> PyResult<Self> {
        let lam = lambda_elem(&spec.inner, &lam, n)?;
        Ok(PyPGModule {
            inner: PhiGammaModule::construct_twisted(
                h,
                s,
                &lam,
                n,
                prec,
                &spec.inner,
                &PhiSpec::Default,
            )
            .map_err(err)?,
            spec: spec.inner.clone(),
        })
    }

    fn rank(&self) -> usize {
        self.inner.rank()
    }

    fn prec(&self) -> i64 {
        self.inner.prec()
    }

    fn phi_matrix(&self) -> String {
        ltpg::json::mat_to_json(self.inner.phi_matrix()).to_string()
    }

    fn gamma_matrix(&self, unit: &str) -> PyResult<String> {
        let u = parse_unit_expr(unit, &self.spec, self.inner.prec()).map_err(err)?;
        let m = self.inner.gamma_matrix(&u).map_err(err)?;
        Ok(ltpg::json::mat_to_json(&m).to_string())
    }

    /// Commutation report for gamma_u and phi, compared to depth `prec`.
    fn check_commutation(&self, unit: &str, prec: i64) -> PyResult<(bool, String)> {
        let u = parse_unit_expr(unit, &self.spec, self.inner.prec()).map_err(err)?;
        let r = self.inner.check_commutation(&u, prec).map_err(err)?;
        Ok((r.ok, r.to_json()))
    }

    /// Cocycle report `Gamma(uv) = Gamma(u) (Gamma(v) o [u])`.
    fn check_cocycle(&self, u: &str, v: &str, prec: i64) -> PyResult<(bool, String)> {
        let u = parse_unit_expr(u, &self.spec, self.inner.prec()).map_err(err)?;
        let v = parse_unit_expr(v, &self.spec, self.inner.prec()).map_err(err)?;
        let r = self.inner.check_cocycle(&u, &v, prec).map_err(err)?;
        Ok((r.ok, r.to_json()))
    }

    /// Top exterior power as a new rank-1 module.
    fn det(&self) -> PyResult<Self> {
        Ok(PyPGModule {
            inner: self.inner.det_module().map_err(err)?,
            spec: self.spec.clone(),
        })
    }

    /// Base change by the diagonal matrix (t^h) (rank 1 only).
    fn rescale(&self, h: i64) -> PyResult<Self> {
        let field = self.inner.phi_matrix().rows[0][0].field().clone();
        if self.inner.rank() != 1 {
            return Err(PyValueError::new_err("rescale applies to rank-1 modules"));
        }
        let p = Mat::new(&field, vec![vec![TSeries::monomial(&field, field.one(), h)]])
            .map_err(err)?;
        Ok(PyPGModule {
            inner: self.inner.base_change(&p).map_err(err)?,
            spec: self.spec.clone(),
        })
    }

    /// Tame-extension reports: phi-fixedness of all product vectors and
    /// the inertia eigenvalue identity for (unit, compatible zeta).
    fn check_tame(&self, h: i64, unit: &str, n_y: i64) -> PyResult<Vec<(bool, String)>> {
        let n = self.inner.rank();
        let ring = TameRing::new(&self.spec, &PhiSpec::Default, n).map_err(err)?;
        let alpha = solve_root_of_sign(n, self.spec.q());
        let vs = ring.build_vj(&self.inner, &alpha, h).map_err(err)?;
        let u = parse_unit_expr(unit, &self.spec, self.inner.prec()).map_err(err)?;
        let g = InertiaElem {
            zeta: ring.compatible_zeta(&u).map_err(err)?,
            u,
        };
        let mut out = Vec::new();
        for (j, v) in vs.iter().enumerate() {
            let r = ring.check_phi_fixed(&self.inner, v, n_y).map_err(err)?;
            out.push((r.ok, r.to_json()));
            let r = ring
                .check_inertia_eigen(&self.inner, v, j, h, &g, n_y)
                .map_err(err)?;
            out.push((r.ok, r.to_json()));
        }
        Ok(out)
    }

    fn __repr__(&self) -> String {
        format!(
            "Module(rank={}, prec={}, spec={})",
            self.inner.rank(),
            self.inner.prec(),
            self.spec.fingerprint()
        )
    }
}

/// Canonical orbits of q-primitive exponents modulo q^n - 1, as
/// (sorted orbit, minimum) pairs.
#[pyfunction]
fn classify(q: u64, n: usize) -> PyResult<Vec<(Vec<u128>, u128)>> {
    ltpg::reps::enumerate_classes(q, n).map_err(err)
}

/// Unramified descent for lambda in F_{q^n} (coefficients in powers of
/// the generator): returns (ok, report_json, extension_index).
#[pyfunction]
fn descent(q: u64, n: usize, lam: Vec<i64>) -> PyResult<(bool, String, usize)> {
    let p = (2..=q).find(|d| q % d == 0).unwrap_or(q);
    let f = {
        let mut f = 0usize;
        let mut m = q;
        while m > 1 {
            m /= p;
            f += 1;
        }
        f
    };
    let field = FiniteField::get(p, f * n);
    let gen = field.gen();
    let mut acc = field.zero();
    let mut pw = field.one();
    for c in &lam {
        acc = acc.add(&field.from_int(*c).mul(&pw));
        pw = pw.mul(&gen);
    }
    let (data, report) = ltpg::tame_ext::unramified_descent(&acc, n, q).map_err(err)?;
    Ok((report.ok, report.to_json(), data.ext_index))
}

#[pymodule]
fn ltpg_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySpec>()?;
    m.add_class::<PyPGModule>()?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(descent, m)?)?;
    Ok(())
}
