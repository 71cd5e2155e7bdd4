//! Python bindings. Reports cross the boundary as plain dicts built from the
//! same JSON the CLI emits; rationals are decimal strings such as "1/2".

use fano12_core::bounds;
use fano12_core::dplattice::{self, ConstructionTarget, DPLattice, LatticeClass};
use fano12_core::enumerate::{self, LinkLedger as CoreLedger};
use fano12_core::icalc::{self, ChernData, CurveData, PolarizedFano};
use fano12_core::linkeq::{
    self, QuadraticForm as CoreForm, Sign, SolutionReport as CoreReport, SolveOptions, VarDomain,
};
use fano12_core::reftable::ReferenceTable;
use fano12_core::Rational;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde::Serialize;

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<T: Serialize>(py: Python<'_>, value: &T) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(value).map_err(err)?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

fn parse_rational(s: &str) -> PyResult<Rational> {
    s.parse::<Rational>().map_err(|e| err(e.0))
}

fn parse_sign(s: &str) -> PyResult<Sign> {
    match s {
        "positive" => Ok(Sign::Positive),
        "nonnegative" => Ok(Sign::NonNegative),
        "any" => Ok(Sign::Any),
        _ => Err(err(format!("unknown sign {s:?}; expected positive, nonnegative or any"))),
    }
}

fn options(modulus_bound: u64) -> SolveOptions {
    SolveOptions { modulus_bound, ..SolveOptions::default() }
}

/// The case grid of two-ray links, with one verdict per cell.
#[pyclass(name = "LinkLedger", frozen)]
struct LinkLedger {
    inner: CoreLedger,
}

#[pymethods]
impl LinkLedger {
    #[getter]
    fn genus(&self) -> i64 {
        self.inner.genus
    }

    fn __len__(&self) -> usize {
        self.inner.cells.len()
    }

    /// Realized rows as dicts, labelled I to IV.
    fn realized(&self, py: Python<'_>) -> PyResult<Vec<Py<PyAny>>> {
        self.inner.realized().into_iter().map(|r| to_py(py, r)).collect()
    }

    /// One summary dict per cell.
    fn cells(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_py(py, &self.inner.to_json()["summary"])
    }

    fn to_tsv(&self) -> String {
        self.inner.to_tsv()
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string_pretty(&self.inner.to_json()).map_err(err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(LinkLedger { inner: serde_json::from_str(text).map_err(err)? })
    }

    /// Replays every certificate; raises ValueError on the first failure.
    fn revalidate(&self) -> PyResult<()> {
        self.inner.revalidate().map_err(err)
    }
}

/// `a x^2 + b xy + c y^2 = d` over restricted rationals.
#[pyclass(name = "QuadraticForm", frozen, skip_from_py_object)]
#[derive(Clone)]
struct QuadraticForm {
    inner: CoreForm,
}

#[pymethods]
impl QuadraticForm {
    #[new]
    #[pyo3(signature = (a, b, c, d, alpha_denominators=vec![1], alpha_sign="any", beta_denominators=vec![1], beta_sign="any"))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        a: &str,
        b: &str,
        c: &str,
        d: &str,
        alpha_denominators: Vec<u32>,
        alpha_sign: &str,
        beta_denominators: Vec<u32>,
        beta_sign: &str,
    ) -> PyResult<Self> {
        let coeffs = [parse_rational(a)?, parse_rational(b)?, parse_rational(c)?, parse_rational(d)?];
        let alpha = VarDomain::new(&alpha_denominators, parse_sign(alpha_sign)?);
        let beta = VarDomain::new(&beta_denominators, parse_sign(beta_sign)?);
        Ok(QuadraticForm { inner: CoreForm::new(coeffs, alpha, beta).map_err(err)? })
    }

    fn is_solution(&self, x: &str, y: &str) -> PyResult<bool> {
        Ok(self.inner.is_solution(&parse_rational(x)?, &parse_rational(y)?))
    }

    fn discriminant(&self) -> String {
        self.inner.discriminant().to_string()
    }

    #[pyo3(signature = (modulus_bound=linkeq::DEFAULT_MODULUS_BOUND))]
    fn solve(&self, modulus_bound: u64) -> SolutionReport {
        SolutionReport { inner: linkeq::solve(&self.inner, &options(modulus_bound)) }
    }

    fn __repr__(&self) -> String {
        format!("QuadraticForm({})", self.inner.describe())
    }
}

/// Solutions of a form, or a certificate that there are none.
#[pyclass(name = "SolutionReport", frozen)]
struct SolutionReport {
    inner: CoreReport,
}

#[pymethods]
impl SolutionReport {
    /// `"solutions"`, `"no_solutions"` or `"unresolved"`.
    #[getter]
    fn status(&self) -> &'static str {
        self.inner.status_name()
    }

    #[getter]
    fn form(&self) -> QuadraticForm {
        QuadraticForm { inner: self.inner.form.clone() }
    }

    #[getter]
    fn exclusion(&self) -> Option<String> {
        self.inner.exclusion.clone()
    }

    #[getter]
    fn certificate_kind(&self) -> Option<&'static str> {
        self.inner.certificate().map(|c| c.kind())
    }

    fn points(&self) -> Vec<(String, String)> {
        self.inner.points().iter().map(|(x, y)| (x.to_string(), y.to_string())).collect()
    }

    /// Replays the certificate against the form; raises ValueError if it does not hold.
    fn verify(&self) -> PyResult<()> {
        match self.inner.certificate() {
            Some(cert) => linkeq::verify_certificate(&self.inner.form, cert).map_err(err),
            None => Err(err("report carries no certificate")),
        }
    }

    fn audit(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_py(py, &self.inner.audit())
    }

    fn to_dict(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_py(py, &self.inner)
    }

    fn __repr__(&self) -> String {
        format!("SolutionReport({}, {})", self.inner.form.describe(), self.inner.status_name())
    }
}

/// Picard lattice of a del Pezzo surface of the given degree.
#[pyclass(name = "DPLattice", frozen)]
struct PyDPLattice {
    inner: DPLattice,
}

impl PyDPLattice {
    fn class(&self, coords: Vec<i64>) -> PyResult<LatticeClass> {
        self.inner.class(coords).map_err(err)
    }
}

fn coords(classes: Vec<LatticeClass>) -> Vec<Vec<i64>> {
    classes.into_iter().map(|c| c.coords).collect()
}

#[pymethods]
impl PyDPLattice {
    #[new]
    fn new(degree: u32) -> PyResult<Self> {
        Ok(PyDPLattice { inner: DPLattice::new(degree).map_err(err)? })
    }

    #[getter]
    fn degree(&self) -> u32 {
        self.inner.degree
    }

    #[getter]
    fn rank(&self) -> usize {
        self.inner.rank()
    }

    fn dot(&self, x: Vec<i64>, y: Vec<i64>) -> PyResult<i64> {
        Ok(self.inner.dot(&self.class(x)?, &self.class(y)?))
    }

    fn anti_degree(&self, x: Vec<i64>) -> PyResult<i64> {
        Ok(self.inner.anti_degree(&self.class(x)?))
    }

    fn arithmetic_genus(&self, x: Vec<i64>) -> PyResult<i64> {
        Ok(self.inner.arithmetic_genus(&self.class(x)?))
    }

    fn exceptional_classes(&self) -> Vec<Vec<i64>> {
        coords(self.inner.exceptional_classes())
    }

    fn conic_classes(&self) -> Vec<Vec<i64>> {
        coords(self.inner.conic_classes())
    }

    fn simple_roots(&self) -> Vec<Vec<i64>> {
        coords(self.inner.simple_roots())
    }

    fn reflect(&self, x: Vec<i64>, root: Vec<i64>) -> PyResult<Vec<i64>> {
        Ok(self.inner.reflect(&self.class(x)?, &self.class(root)?).coords)
    }

    fn is_nef(&self, x: Vec<i64>) -> PyResult<bool> {
        Ok(self.inner.is_nef(&self.class(x)?))
    }

    /// Human-readable form such as `2h-e1-e2`.
    fn show(&self, x: Vec<i64>) -> PyResult<String> {
        Ok(self.class(x)?.to_string())
    }
}

#[pyfunction]
#[pyo3(signature = (genus=12, rank=2, modulus_bound=linkeq::DEFAULT_MODULUS_BOUND))]
fn enumerate_links(genus: i64, rank: u32, modulus_bound: u64) -> PyResult<LinkLedger> {
    let inner =
        enumerate::enumerate_links(genus, rank, &ReferenceTable::bundled(), &options(modulus_bound)).map_err(err)?;
    Ok(LinkLedger { inner })
}

#[pyfunction]
#[pyo3(signature = (delta, beta=None, kcube=22))]
fn solve_e5(delta: i64, beta: Option<i64>, kcube: i64) -> PyResult<SolutionReport> {
    let inner = linkeq::solve_e5_pair(&kcube.into(), delta, beta, &SolveOptions::default()).map_err(err)?;
    Ok(SolutionReport { inner })
}

#[pyfunction]
#[pyo3(signature = (deg, beta=None, kcube=22))]
fn solve_cc(deg: i64, beta: Option<i64>, kcube: i64) -> PyResult<SolutionReport> {
    let inner = linkeq::solve_cc(&kcube.into(), deg, beta, &SolveOptions::default()).map_err(err)?;
    Ok(SolutionReport { inner })
}

/// Returns `(report, fiber_degree)`; the fiber degree is set when a point is selected.
#[pyfunction]
#[pyo3(signature = (deg, kcube=22))]
fn solve_cd(deg: i64, kcube: i64) -> PyResult<(SolutionReport, Option<String>)> {
    let cd = linkeq::solve_cd(&kcube.into(), deg, &SolveOptions::default()).map_err(err)?;
    Ok((SolutionReport { inner: cd.report }, cd.fiber_degree.map(|f| f.to_string())))
}

#[pyfunction]
#[pyo3(signature = (fiber, kcube=22))]
fn solve_dd(fiber: i64, kcube: i64) -> PyResult<SolutionReport> {
    Ok(SolutionReport { inner: linkeq::solve_dd(&kcube.into(), fiber).map_err(err)? })
}

#[pyfunction]
fn castelnuovo_bound(d: i64, n: i64) -> PyResult<i64> {
    enumerate::castelnuovo_bound(d, n).map_err(err)
}

/// `(-K)^3` after blowing up a curve of `H`-degree `h_degree` and genus `pa`.
#[pyfunction]
fn curve_blowup_kcube(iota: u32, hcube: i64, h_degree: u32, pa: i64) -> PyResult<String> {
    let base = PolarizedFano::new("W", iota, hcube);
    let ring = icalc::curve_blowup_ring(&base, &CurveData { h_degree, pa }).map_err(err)?;
    Ok(ring.kcube().to_string())
}

/// `[M^3, M^2 F, M F^2, F^3]` for a rank-2 bundle over the plane.
#[pyfunction]
fn projbundle_monomials(c1sq: i64, c2: i64) -> PyResult<Vec<String>> {
    let ring = icalc::projbundle_ring(&ChernData::over_plane(c1sq, c2)).map_err(err)?;
    Ok(ring.monomials().iter().map(|m| m.to_string()).collect())
}

#[pyfunction]
fn prop24_certify(py: Python<'_>) -> PyResult<Py<PyAny>> {
    to_py(py, &bounds::prop24_certify(&ReferenceTable::bundled()).map_err(err)?)
}

#[pyfunction]
fn le10_certify(py: Python<'_>) -> PyResult<Py<PyAny>> {
    to_py(py, &bounds::le10_certify(&ReferenceTable::bundled()).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (genus=12, planes_allowed=false))]
fn main_theorem_verdict(py: Python<'_>, genus: i64, planes_allowed: bool) -> PyResult<Py<PyAny>> {
    to_py(py, &bounds::main_theorem_verdict(genus, planes_allowed, &ReferenceTable::bundled()).map_err(err)?)
}

#[pyfunction]
fn orbit_divisibility(py: Python<'_>, degree: i64) -> PyResult<Py<PyAny>> {
    to_py(py, &bounds::orbit_divisibility(degree).map_err(err)?)
}

/// Lattice check of the curve on the surface through the base; target is `P3`, `Q` or `V5`.
#[pyfunction]
fn construction_check(py: Python<'_>, target: &str) -> PyResult<Py<PyAny>> {
    let t = ConstructionTarget::parse(target).ok_or_else(|| err(format!("unknown target {target:?}")))?;
    to_py(py, &dplattice::construction_check(t).map_err(err)?)
}

#[pyfunction]
fn pe_numerics(py: Python<'_>) -> PyResult<Py<PyAny>> {
    to_py(py, &dplattice::pe_numerics().map_err(err)?)
}

#[pymodule]
fn fano12(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<LinkLedger>()?;
    m.add_class::<QuadraticForm>()?;
    m.add_class::<SolutionReport>()?;
    m.add_class::<PyDPLattice>()?;
    m.add_function(wrap_pyfunction!(enumerate_links, m)?)?;
    m.add_function(wrap_pyfunction!(solve_e5, m)?)?;
    m.add_function(wrap_pyfunction!(solve_cc, m)?)?;
    m.add_function(wrap_pyfunction!(solve_cd, m)?)?;
    m.add_function(wrap_pyfunction!(solve_dd, m)?)?;
    m.add_function(wrap_pyfunction!(castelnuovo_bound, m)?)?;
    m.add_function(wrap_pyfunction!(curve_blowup_kcube, m)?)?;
    m.add_function(wrap_pyfunction!(projbundle_monomials, m)?)?;
    m.add_function(wrap_pyfunction!(prop24_certify, m)?)?;
    m.add_function(wrap_pyfunction!(le10_certify, m)?)?;
    m.add_function(wrap_pyfunction!(main_theorem_verdict, m)?)?;
    m.add_function(wrap_pyfunction!(orbit_divisibility, m)?)?;
    m.add_function(wrap_pyfunction!(construction_check, m)?)?;
    m.add_function(wrap_pyfunction!(pe_numerics, m)?)?;
    Ok(())
}
