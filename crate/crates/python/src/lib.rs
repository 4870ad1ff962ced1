//! Python bindings for the baryolson library.
//!
//! Exposes the group type and the main operations — barycentric predicates,
//! the exact BO solver, the witness constructions, and the closed-form
//! bounds — as a `baryolson_py` extension module. Elements of cyclic groups
//! travel as plain ints; elements of higher-rank groups as lists of ints.

use num_bigint::BigInt;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use baryolson::constructions::{self, WitnessRecord};
use baryolson::engine::{self, SearchConfig};
use baryolson::error::Error;
use baryolson::group::{ElementSet, FiniteAbelianGroup, GroupElement};
use baryolson::theory::{self, ChiParams};

fn to_py_err(err: Error) -> PyErr {
    match err {
        Error::InvalidArgument(_) | Error::Structure(_) => PyValueError::new_err(err.to_string()),
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

/// A finite abelian group in invariant-factor form.
#[pyclass(frozen, name = "Group")]
struct PyGroup {
    inner: FiniteAbelianGroup,
}

#[derive(FromPyObject)]
enum GroupSpec {
    Factors(Vec<u64>),
    Text(String),
}

#[derive(FromPyObject)]
enum ElemSpec {
    Scalar(i64),
    Coords(Vec<i64>),
}

impl PyGroup {
    fn element(&self, spec: &ElemSpec) -> PyResult<GroupElement> {
        let coords: Vec<i64> = match spec {
            ElemSpec::Scalar(x) => {
                if self.inner.rank() != 1 {
                    return Err(PyValueError::new_err(format!(
                        "group of rank {} needs a coordinate list",
                        self.inner.rank()
                    )));
                }
                vec![*x]
            }
            ElemSpec::Coords(coords) => coords.clone(),
        };
        self.inner.element(&coords).map_err(to_py_err)
    }

    fn element_set(&self, elements: Vec<ElemSpec>) -> PyResult<ElementSet> {
        let mut set = ElementSet::new(self.inner.clone());
        for spec in &elements {
            let g = self.element(spec)?;
            set.insert(&g).map_err(to_py_err)?;
        }
        Ok(set)
    }

    fn export(&self, py: Python<'_>, g: &GroupElement) -> Py<PyAny> {
        if self.inner.rank() == 1 {
            g.coords()[0].into_pyobject(py).unwrap().into_any().unbind()
        } else {
            g.coords().to_vec().into_pyobject(py).unwrap().into_any().unbind()
        }
    }

    fn export_set(&self, py: Python<'_>, set: &ElementSet) -> Vec<Py<PyAny>> {
        set.iter().map(|g| self.export(py, &g)).collect()
    }
}

#[pymethods]
impl PyGroup {
    /// Group([2, 4]) or Group("2,4"): invariant factors n1 | n2 | ... | nr.
    #[new]
    fn new(spec: GroupSpec) -> PyResult<Self> {
        let inner = match spec {
            GroupSpec::Factors(factors) => FiniteAbelianGroup::new(factors),
            GroupSpec::Text(text) => text.parse(),
        }
        .map_err(to_py_err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn order(&self) -> u64 {
        self.inner.order()
    }

    #[getter]
    fn rank(&self) -> usize {
        self.inner.rank()
    }

    #[getter]
    fn exponent(&self) -> u64 {
        self.inner.exponent()
    }

    #[getter]
    fn invariant_factors(&self) -> Vec<u64> {
        self.inner.invariant_factors().to_vec()
    }

    #[getter]
    fn is_cyclic(&self) -> bool {
        self.inner.is_cyclic()
    }

    fn p_rank(&self, p: u64) -> PyResult<usize> {
        self.inner.p_rank(p).map_err(to_py_err)
    }

    fn add(&self, py: Python<'_>, a: ElemSpec, b: ElemSpec) -> PyResult<Py<PyAny>> {
        let sum = self
            .inner
            .add(&self.element(&a)?, &self.element(&b)?)
            .map_err(to_py_err)?;
        Ok(self.export(py, &sum))
    }

    fn scalar_mul(&self, py: Python<'_>, t: i64, g: ElemSpec) -> PyResult<Py<PyAny>> {
        let out = self
            .inner
            .scalar_mul(t, &self.element(&g)?)
            .map_err(to_py_err)?;
        Ok(self.export(py, &out))
    }

    /// Sum of the given elements (the identity for an empty list).
    fn sigma(&self, py: Python<'_>, elements: Vec<ElemSpec>) -> PyResult<Py<PyAny>> {
        let set = self.element_set(elements)?;
        Ok(self.export(py, &set.sum()))
    }

    /// Sum of every element of the group, from the structure alone.
    fn sigma_group(&self, py: Python<'_>) -> Py<PyAny> {
        self.export(py, &self.inner.sigma_group_formula())
    }

    /// The subgroup {2g : g in G}.
    fn double_image(&self, py: Python<'_>) -> Vec<Py<PyAny>> {
        self.export_set(py, &self.inner.double_image())
    }

    fn elements(&self, py: Python<'_>) -> Vec<Py<PyAny>> {
        self.inner
            .elements()
            .map(|g| self.export(py, &g))
            .collect()
    }

    fn __repr__(&self) -> String {
        format!("Group(\"{}\")", self.inner)
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }
}

/// All abelian groups of the given order, one per isomorphism class.
#[pyfunction]
fn enumerate_groups(order: u64) -> PyResult<Vec<PyGroup>> {
    Ok(baryolson::group::enumerate_groups(order)
        .map_err(to_py_err)?
        .into_iter()
        .map(|inner| PyGroup { inner })
        .collect())
}

/// Least t >= 1 with s^t = 1 (mod n); needs gcd(s, n) = 1.
#[pyfunction]
fn mult_order(s: u64, n: u64) -> PyResult<u64> {
    baryolson::group::mult_order(s, n).map_err(to_py_err)
}

/// Is the set {g_1, ..., g_k} barycentric, i.e. its sum equal to k times
/// one of its members?
#[pyfunction]
fn is_barycentric(group: &PyGroup, elements: Vec<ElemSpec>) -> PyResult<bool> {
    Ok(engine::is_barycentric(&group.element_set(elements)?))
}

/// Does the set contain a k-barycentric subset?
#[pyfunction]
fn has_k_barycentric_subset(group: &PyGroup, elements: Vec<ElemSpec>, k: u64) -> PyResult<bool> {
    Ok(engine::has_k_barycentric_subset(
        &group.element_set(elements)?,
        k,
    ))
}

/// A k-barycentric subset of the set, or None.
#[pyfunction]
fn find_k_barycentric_subset(
    py: Python<'_>,
    group: &PyGroup,
    elements: Vec<ElemSpec>,
    k: u64,
) -> PyResult<Option<Vec<Py<PyAny>>>> {
    let set = group.element_set(elements)?;
    Ok(engine::find_k_barycentric_subset(&set, k).map(|w| group.export_set(py, &w)))
}

/// All sums of k-element subsets.
#[pyfunction]
fn sigma_k(
    py: Python<'_>,
    group: &PyGroup,
    elements: Vec<ElemSpec>,
    k: u64,
) -> PyResult<Vec<Py<PyAny>>> {
    let set = group.element_set(elements)?;
    let sums = engine::sigma_k(&set, k).map_err(to_py_err)?;
    Ok(group.export_set(py, &sums))
}

/// {a1 + a2 + k*a3 : pairwise distinct members}, over a prime cyclic group.
#[pyfunction]
fn s_k_set(
    py: Python<'_>,
    group: &PyGroup,
    elements: Vec<ElemSpec>,
    k: u64,
) -> PyResult<Vec<Py<PyAny>>> {
    let set = group.element_set(elements)?;
    let out = engine::s_k_set(&set, k).map_err(to_py_err)?;
    Ok(group.export_set(py, &out))
}

/// Exact BO(k, G) by exhaustive search. Returns a dict with the value, the
/// lexicographically smallest maximum witness, the method, and the elapsed
/// milliseconds.
#[pyfunction]
#[pyo3(signature = (group, k, workers = 1, node_budget = None, use_affine_reduction = true))]
fn bo(
    py: Python<'_>,
    group: &PyGroup,
    k: u64,
    workers: usize,
    node_budget: Option<u64>,
    use_affine_reduction: bool,
) -> PyResult<Py<PyDict>> {
    let cfg = SearchConfig {
        use_affine_reduction,
        worker_count: workers,
        node_budget,
    };
    let result = engine::bo_exhaustive(&group.inner, k, &cfg).map_err(to_py_err)?;
    let dict = PyDict::new(py);
    dict.set_item("group", group.inner.to_string())?;
    dict.set_item("k", result.k)?;
    dict.set_item("value", result.value)?;
    dict.set_item("witness", group.export_set(py, &result.witness))?;
    dict.set_item("method", result.method.to_string())?;
    dict.set_item("elapsed_ms", result.elapsed.as_secs_f64() * 1e3)?;
    Ok(dict.into())
}

/// Exact BO(k, G) where a corner-case formula applies, else None.
#[pyfunction]
fn bo_corner(group: &PyGroup, k: u64) -> Option<u64> {
    theory::bo_corner(&group.inner, k)
}

/// Every applicable closed-form bound for (G, k), with theorem tags.
#[pyfunction]
fn bound_report(py: Python<'_>, group: &PyGroup, k: u64) -> PyResult<Py<PyDict>> {
    let report = theory::bound_report(&group.inner, k).map_err(to_py_err)?;
    let dict = PyDict::new(py);
    let pairs = |v: &[(u64, theory::TheoremTag)]| -> Vec<(u64, String)> {
        v.iter().map(|&(x, t)| (x, t.to_string())).collect()
    };
    dict.set_item("group", report.group.to_string())?;
    dict.set_item("k", report.k)?;
    dict.set_item("lower_bounds", pairs(&report.lower_bounds))?;
    dict.set_item("upper_bounds", pairs(&report.upper_bounds))?;
    dict.set_item(
        "exact",
        report.exact.map(|(v, t)| (v, t.to_string())),
    )?;
    Ok(dict.into())
}

fn witness_dict(py: Python<'_>, record: &WitnessRecord) -> PyResult<Py<PyDict>> {
    let group = PyGroup {
        inner: record.set.group().clone(),
    };
    let dict = PyDict::new(py);
    dict.set_item("n", record.n)?;
    dict.set_item("k", record.k)?;
    dict.set_item("method", record.method.to_string())?;
    match record.params {
        Some(p) => {
            let params = PyDict::new(py);
            params.set_item("d", p.d)?;
            params.set_item("m", p.m)?;
            params.set_item("r", p.r)?;
            params.set_item("base", p.base)?;
            params.set_item("degenerate", p.degenerate)?;
            dict.set_item("params", params)?;
        }
        None => dict.set_item("params", py.None())?,
    }
    dict.set_item("elements", group.export_set(py, &record.set))?;
    dict.set_item("verified", record.verified)?;
    Ok(dict.into())
}

/// The k-element non-barycentric interval witness for coprime (n, k).
#[pyfunction]
fn lb_witness(py: Python<'_>, n: u64, k: u64) -> PyResult<Py<PyDict>> {
    witness_dict(py, &constructions::lb_witness(n, k).map_err(to_py_err)?)
}

/// The (k+1)-element coset witness at k = (p-1)/2, for even order of 2.
#[pyfunction]
fn th8_witness(py: Python<'_>, p: u64) -> PyResult<Py<PyDict>> {
    witness_dict(py, &constructions::th8_witness(p).map_err(to_py_err)?)
}

/// The digit-shell witness; m = None tries every digit count.
#[pyfunction]
#[pyo3(signature = (n, k, m = None))]
fn behrend_witness(py: Python<'_>, n: u64, k: u64, m: Option<u32>) -> PyResult<Py<PyDict>> {
    witness_dict(
        py,
        &constructions::behrend_witness(n, k, m).map_err(to_py_err)?,
    )
}

/// The digit parameter d for (n, k, m).
#[pyfunction]
fn behrend_d(n: u64, k: u64, m: u32) -> PyResult<u64> {
    constructions::behrend_d(n, k, m).map_err(to_py_err)
}

/// chi in closed form, as an exact integer.
#[pyfunction]
fn chi(k: u64, c1: u64, c2: u64, c3: u64) -> BigInt {
    theory::chi_closed_form(&ChiParams::new(k, c1, c2, c3))
}

/// chi as the signed sum of six trinomial coefficients (the oracle route).
#[pyfunction]
fn chi_direct(k: u64, c1: u64, c2: u64, c3: u64) -> BigInt {
    theory::chi_direct(&ChiParams::new(k, c1, c2, c3))
}

/// chi reduced into 0..p.
#[pyfunction]
fn chi_mod_p(k: u64, c1: u64, c2: u64, c3: u64, p: u64) -> PyResult<u64> {
    theory::chi_mod_p(&ChiParams::new(k, c1, c2, c3), p).map_err(to_py_err)
}

/// (lower, upper) interval bounds for BO(k, Z/p).
#[pyfunction]
fn w1_bounds(p: u64, k: u64) -> PyResult<(u64, u64)> {
    theory::w1_bounds(p, k).map_err(to_py_err)
}

/// min(p, k(a-k)+1).
#[pyfunction]
fn dsh_bound(p: u64, a: u64, k: u64) -> u64 {
    theory::dsh_bound(p, a, k)
}

/// k+1 in the coprimality window, else None.
#[pyfunction]
fn proptech_value(n: u64, k: u64) -> Option<u64> {
    theory::proptech_value(n, k)
}

/// (k, BO(k, Z/p)) at the threshold k = (p-1)/2.
#[pyfunction]
fn th8_value(p: u64) -> PyResult<(u64, u64)> {
    theory::th8_value(p).map_err(to_py_err)
}

/// (k+1, k+2) in the polynomial-method window.
#[pyfunction]
fn ubpol_bounds(p: u64, k: u64) -> PyResult<(u64, u64)> {
    theory::ubpol_bounds(p, k).map_err(to_py_err)
}

/// The three-case floor for |S_k(A)|.
#[pyfunction]
fn sk_lemma_bound(p: u64, a: u64, k: u64) -> PyResult<u64> {
    theory::sk_lemma_bound(p, a, k).map_err(to_py_err)
}

/// The digit-shell lower bound, maximized over feasible digit counts.
#[pyfunction]
fn behrend_bound(n: u64, k: u64) -> PyResult<f64> {
    theory::behrend_bound(n, k).map_err(to_py_err)
}

/// The asymptotic reference value n exp(-5 sqrt(log k log n)).
#[pyfunction]
fn behrend_corollary_bound(n: u64, k: u64) -> f64 {
    theory::behrend_corollary_bound(n, k)
}

#[pymodule]
fn baryolson_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGroup>()?;
    m.add_function(wrap_pyfunction!(enumerate_groups, m)?)?;
    m.add_function(wrap_pyfunction!(mult_order, m)?)?;
    m.add_function(wrap_pyfunction!(is_barycentric, m)?)?;
    m.add_function(wrap_pyfunction!(has_k_barycentric_subset, m)?)?;
    m.add_function(wrap_pyfunction!(find_k_barycentric_subset, m)?)?;
    m.add_function(wrap_pyfunction!(sigma_k, m)?)?;
    m.add_function(wrap_pyfunction!(s_k_set, m)?)?;
    m.add_function(wrap_pyfunction!(bo, m)?)?;
    m.add_function(wrap_pyfunction!(bo_corner, m)?)?;
    m.add_function(wrap_pyfunction!(bound_report, m)?)?;
    m.add_function(wrap_pyfunction!(lb_witness, m)?)?;
    m.add_function(wrap_pyfunction!(th8_witness, m)?)?;
    m.add_function(wrap_pyfunction!(behrend_witness, m)?)?;
    m.add_function(wrap_pyfunction!(behrend_d, m)?)?;
    m.add_function(wrap_pyfunction!(chi, m)?)?;
    m.add_function(wrap_pyfunction!(chi_direct, m)?)?;
    m.add_function(wrap_pyfunction!(chi_mod_p, m)?)?;
    m.add_function(wrap_pyfunction!(w1_bounds, m)?)?;
    m.add_function(wrap_pyfunction!(dsh_bound, m)?)?;
    m.add_function(wrap_pyfunction!(proptech_value, m)?)?;
    m.add_function(wrap_pyfunction!(th8_value, m)?)?;
    m.add_function(wrap_pyfunction!(ubpol_bounds, m)?)?;
    m.add_function(wrap_pyfunction!(sk_lemma_bound, m)?)?;
    m.add_function(wrap_pyfunction!(behrend_bound, m)?)?;
    m.add_function(wrap_pyfunction!(behrend_corollary_bound, m)?)?;
    Ok(())
}
