//! Python bindings: stable graphs, tautological classes, boundary pullbacks,
//! the odd Künneth report and admissible double covers.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use tautring::boundary::{forgetful_pushforward, xi_pullback, xi_pushforward};
use tautring::canon::{automorphism_count, canonical_graph};
use tautring::covers::{diagonal_witness, enumerate_covers, stabilize_source, validate_cover};
use tautring::expr::{evaluate, resolve_graph, GraphRef, Value};
use tautring::json::{
    class_to_json, cover_to_json, factorwise_to_json, graph_to_json, parse_class, parse_cover,
    parse_graph, parse_rational,
};
use tautring::odd::{self as oddmod, Family, OddBasisElement, OddTensor, Side};
use tautring::strata::q;
use tautring::structures::enumerate_generic_overlaps;
use tautring::{Ambient, CoverGraph, FactorwiseClass, StableGraph, TautClass, Q};

fn value_error(e: tautring::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn fraction<'py>(py: Python<'py>, x: &Q) -> PyResult<Bound<'py, PyAny>> {
    let text = format!("{}/{}", x.numer(), x.denom());
    py.import("fractions")?.getattr("Fraction")?.call1((text,))
}

/// Accepts `int`, `Fraction` or a string such as `"3/2"`.
fn rational(x: &Bound<'_, PyAny>) -> PyResult<Q> {
    parse_rational(&x.str()?.to_cow()?).map_err(value_error)
}

#[pyclass(name = "Graph", module = "pytautring", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
pub struct PyGraph {
    inner: StableGraph,
}

#[pymethods]
impl PyGraph {
    /// `legs` pairs each marking with its vertex; `edges` pairs vertices.
    #[new]
    #[pyo3(signature = (genera, edges = Vec::new(), legs = Vec::new()))]
    fn new(
        genera: Vec<u32>,
        edges: Vec<(usize, usize)>,
        legs: Vec<(u32, usize)>,
    ) -> PyResult<Self> {
        let nv = genera.len();
        if edges.iter().any(|&(u, v)| u >= nv || v >= nv) || legs.iter().any(|&(_, v)| v >= nv) {
            return Err(PyValueError::new_err("vertex index out of range"));
        }
        Ok(PyGraph {
            inner: StableGraph::from_edges(genera, &edges, &legs),
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyGraph {
            inner: parse_graph(text).map_err(value_error)?,
        })
    }

    /// Named graphs such as `delta0`, `c0` or `delta1`.
    #[staticmethod]
    fn named(name: &str, genus: u32, n: u32) -> PyResult<Self> {
        let r = GraphRef {
            text: name.to_string(),
            pos: 0,
        };
        Ok(PyGraph {
            inner: resolve_graph(&r, Ambient::new(genus, n)).map_err(value_error)?,
        })
    }

    fn to_json(&self) -> String {
        graph_to_json(&self.inner)
    }

    #[getter]
    fn genera(&self) -> Vec<u32> {
        self.inner.genera().to_vec()
    }

    #[getter]
    fn edges(&self) -> Vec<(usize, usize)> {
        let g = &self.inner;
        g.edges()
            .iter()
            .map(|&(h, k)| (g.vertex_of(h), g.vertex_of(k)))
            .collect()
    }

    #[getter]
    fn legs(&self) -> Vec<(u32, usize)> {
        self.inner
            .legs()
            .iter()
            .map(|l| (l.marking, l.vertex))
            .collect()
    }

    fn genus(&self) -> PyResult<u32> {
        self.inner.genus().map_err(value_error)
    }

    fn dimension(&self) -> i64 {
        self.inner.dimension()
    }

    fn num_edges(&self) -> usize {
        self.inner.num_edges()
    }

    fn automorphisms(&self) -> u64 {
        automorphism_count(&self.inner)
    }

    fn canonical(&self) -> Self {
        PyGraph {
            inner: canonical_graph(&self.inner),
        }
    }

    fn is_isomorphic(&self, other: &PyGraph) -> bool {
        canonical_graph(&self.inner) == canonical_graph(&other.inner)
    }

    /// Violation messages; empty when the graph is a valid stable graph.
    fn validate(&self) -> Vec<String> {
        self.inner
            .validate()
            .violations
            .iter()
            .map(ToString::to_string)
            .collect()
    }

    fn contract(&self, edges: Vec<usize>) -> PyResult<Self> {
        Ok(PyGraph {
            inner: self.inner.contract_edges(&edges).map_err(value_error)?,
        })
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Graph({})", self.inner)
    }
}

#[pyclass(name = "Class", module = "pytautring", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
pub struct PyClass {
    inner: TautClass,
}

impl PyClass {
    fn wrap(inner: TautClass) -> Self {
        PyClass { inner }
    }
}

#[pymethods]
impl PyClass {
    /// Evaluates an expression such as `bd(delta0)*psi(1) - 2*kappa(1)`.
    #[staticmethod]
    fn parse(expr: &str, genus: u32, n: u32) -> PyResult<Self> {
        let amb = Ambient::new(genus, n);
        let v = evaluate(expr, amb).map_err(value_error)?;
        Ok(Self::wrap(v.into_class(amb).map_err(value_error)?))
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self::wrap(parse_class(text).map_err(value_error)?))
    }

    #[staticmethod]
    fn fundamental(genus: u32, n: u32) -> Self {
        Self::wrap(TautClass::fundamental(Ambient::new(genus, n)))
    }

    #[staticmethod]
    fn psi(genus: u32, n: u32, marking: u32) -> PyResult<Self> {
        Ok(Self::wrap(
            TautClass::psi(Ambient::new(genus, n), marking).map_err(value_error)?,
        ))
    }

    #[staticmethod]
    fn kappa(genus: u32, n: u32, index: u32) -> Self {
        Self::wrap(TautClass::kappa(Ambient::new(genus, n), index))
    }

    #[staticmethod]
    fn boundary(graph: &PyGraph) -> PyResult<Self> {
        Ok(Self::wrap(
            TautClass::boundary(&graph.inner).map_err(value_error)?,
        ))
    }

    #[getter]
    fn ambient(&self) -> (u32, u32) {
        let a = self.inner.ambient();
        (a.genus, a.n)
    }

    fn is_zero(&self) -> bool {
        self.inner.is_zero()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    /// `(coefficient, stratum)` pairs in normal-form order.
    fn terms<'py>(&self, py: Python<'py>) -> PyResult<Vec<(Bound<'py, PyAny>, String)>> {
        self.inner
            .terms()
            .iter()
            .map(|(s, c)| Ok((fraction(py, c)?, s.to_string())))
            .collect()
    }

    fn codimensions(&self) -> Vec<u32> {
        self.inner.codimensions()
    }

    fn __add__(&self, other: &PyClass) -> PyResult<Self> {
        Ok(Self::wrap(
            self.inner.add(&other.inner).map_err(value_error)?,
        ))
    }

    fn __sub__(&self, other: &PyClass) -> PyResult<Self> {
        Ok(Self::wrap(
            self.inner.sub(&other.inner).map_err(value_error)?,
        ))
    }

    fn __mul__(&self, other: &PyClass) -> PyResult<Self> {
        Ok(Self::wrap(
            self.inner.mul(&other.inner).map_err(value_error)?,
        ))
    }

    fn __neg__(&self) -> Self {
        Self::wrap(self.inner.scale(&q(-1)))
    }

    fn scale(&self, factor: &Bound<'_, PyAny>) -> PyResult<Self> {
        Ok(Self::wrap(self.inner.scale(&rational(factor)?)))
    }

    /// Pushforward along the map forgetting the last marking.
    fn pushforward_forget(&self) -> PyResult<Self> {
        Ok(Self::wrap(
            forgetful_pushforward(&self.inner).map_err(value_error)?,
        ))
    }

    fn pullback(&self, graph: &PyGraph) -> PyResult<PyFactorwise> {
        Ok(PyFactorwise {
            inner: xi_pullback(&graph.inner, &self.inner).map_err(value_error)?,
        })
    }

    fn to_json(&self) -> String {
        class_to_json(&self.inner)
    }

    fn __str__(&self) -> String {
        self.inner.render()
    }

    fn __repr__(&self) -> String {
        let a = self.inner.ambient();
        format!(
            "Class(ambient=({}, {}), terms={})",
            a.genus,
            a.n,
            self.inner.len()
        )
    }
}

/// A class on the product of vertex moduli spaces of a stable graph.
#[pyclass(
    name = "Factorwise",
    module = "pytautring",
    frozen,
    eq,
    skip_from_py_object
)]
#[derive(Clone, PartialEq)]
pub struct PyFactorwise {
    inner: FactorwiseClass,
}

#[pymethods]
impl PyFactorwise {
    #[getter]
    fn base(&self) -> PyGraph {
        PyGraph {
            inner: self.inner.base().clone(),
        }
    }

    fn is_zero(&self) -> bool {
        self.inner.is_zero()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    /// `(coefficient, [class per vertex])` pairs.
    fn pure_tensors<'py>(
        &self,
        py: Python<'py>,
    ) -> PyResult<Vec<(Bound<'py, PyAny>, Vec<PyClass>)>> {
        self.inner
            .pure_tensors()
            .into_iter()
            .map(|(c, factors)| {
                Ok((
                    fraction(py, &c)?,
                    factors.into_iter().map(PyClass::wrap).collect(),
                ))
            })
            .collect()
    }

    fn pushforward(&self) -> PyResult<PyClass> {
        Ok(PyClass::wrap(
            xi_pushforward(self.inner.base(), &self.inner).map_err(value_error)?,
        ))
    }

    fn to_json(&self) -> String {
        factorwise_to_json(&self.inner)
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }
}

/// Generic overlaps of `a` and `b` as `(graph, shared edge indices)`.
#[pyfunction]
fn overlaps(a: &PyGraph, b: &PyGraph) -> PyResult<Vec<(PyGraph, Vec<usize>)>> {
    Ok(enumerate_generic_overlaps(&a.inner, &b.inner)
        .map_err(value_error)?
        .into_iter()
        .map(|o| (PyGraph { inner: o.graph }, o.shared_edges))
        .collect())
}

/// Evaluates an expression; factorwise results are returned as such.
#[pyfunction]
fn evaluate_expr(py: Python<'_>, expr: &str, genus: u32, n: u32) -> PyResult<Py<PyAny>> {
    let v = evaluate(expr, Ambient::new(genus, n)).map_err(value_error)?;
    Ok(match v {
        Value::Scalar(x) => fraction(py, &x)?.unbind(),
        Value::Class(t) => PyClass::wrap(t).into_pyobject(py)?.into_any().unbind(),
        Value::Factorwise(f) => PyFactorwise { inner: f }
            .into_pyobject(py)?
            .into_any()
            .unbind(),
    })
}

fn basis_element(name: &str) -> PyResult<OddBasisElement> {
    let bad = || PyValueError::new_err(format!("malformed odd basis element {name:?}"));
    let mut chars = name.chars();
    let family = match chars.next() {
        Some('a') => Family::A,
        Some('b') => Family::B,
        Some('c') => Family::C,
        Some('d') => Family::D,
        _ => return Err(bad()),
    };
    let rest = chars.as_str();
    let (side, digits) = match rest.strip_prefix('~') {
        Some(d) => (Side::Second, d),
        None => (Side::First, rest),
    };
    let index: u8 = digits.trim_start_matches('_').parse().map_err(|_| bad())?;
    OddBasisElement::new(family, index, side).map_err(value_error)
}

fn tensor_dict<'py>(py: Python<'py>, t: &OddTensor) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    for ((x, y), c) in t.terms() {
        d.set_item((x.to_string(), y.to_string()), fraction(py, c)?)?;
    }
    Ok(d)
}

/// `∫ x ∪ y` for basis elements named like `a3` or `d_5`.
#[pyfunction]
fn pairing<'py>(py: Python<'py>, x: &str, y: &str) -> PyResult<Bound<'py, PyAny>> {
    let v = oddmod::pairing(basis_element(x)?, basis_element(y)?).map_err(value_error)?;
    fraction(py, &v)
}

#[pyfunction]
fn psi_action(x: &str) -> PyResult<Option<String>> {
    Ok(oddmod::psi_action(basis_element(x)?).map(|e| e.to_string()))
}

#[pyfunction]
fn diagonal_odd_part(py: Python<'_>) -> PyResult<Bound<'_, PyDict>> {
    tensor_dict(py, &oddmod::diagonal_odd_part())
}

#[pyfunction]
fn self_intersection_odd(py: Python<'_>) -> PyResult<Bound<'_, PyDict>> {
    tensor_dict(py, &oddmod::self_intersection_odd())
}

/// Verdict and witness for the odd part of the self-intersection.
#[pyfunction]
fn odd_report(py: Python<'_>) -> PyResult<Bound<'_, PyDict>> {
    let r = oddmod::nontautological_report(&oddmod::self_intersection_odd());
    let d = PyDict::new(py);
    d.set_item("verdict", r.verdict.to_string())?;
    let witness = match &r.witness {
        Some((c, x, y)) => Some((fraction(py, c)?, x.to_string(), y.to_string())),
        None => None,
    };
    d.set_item("witness", witness)?;
    d.set_item("tensor", tensor_dict(py, &r.tensor)?)?;
    Ok(d)
}

#[pyclass(name = "Cover", module = "pytautring", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
pub struct PyCover {
    inner: CoverGraph,
}

#[pymethods]
impl PyCover {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyCover {
            inner: parse_cover(text).map_err(value_error)?,
        })
    }

    #[getter]
    fn source(&self) -> PyGraph {
        PyGraph {
            inner: self.inner.source.clone(),
        }
    }

    #[getter]
    fn target(&self) -> PyGraph {
        PyGraph {
            inner: self.inner.target.clone(),
        }
    }

    fn source_genus(&self) -> i64 {
        self.inner.source_genus()
    }

    fn validate(&self) -> Vec<String> {
        validate_cover(&self.inner)
            .violations
            .iter()
            .map(ToString::to_string)
            .collect()
    }

    fn stabilized_source(&self) -> PyResult<PyGraph> {
        Ok(PyGraph {
            inner: stabilize_source(&self.inner).map_err(value_error)?,
        })
    }

    fn to_json(&self) -> String {
        cover_to_json(&self.inner)
    }
}

#[pyfunction]
fn covers(target: &PyGraph, b: u32, k: u32) -> PyResult<Vec<PyCover>> {
    Ok(enumerate_covers(&target.inner, b, k)
        .map_err(value_error)?
        .into_iter()
        .map(|inner| PyCover { inner })
        .collect())
}

#[pyfunction]
fn witness(h: u32) -> PyResult<PyCover> {
    Ok(PyCover {
        inner: diagonal_witness(h).map_err(value_error)?,
    })
}

#[pymodule]
pub fn pytautring(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_class::<PyClass>()?;
    m.add_class::<PyFactorwise>()?;
    m.add_class::<PyCover>()?;
    m.add_function(wrap_pyfunction!(overlaps, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate_expr, m)?)?;
    m.add_function(wrap_pyfunction!(pairing, m)?)?;
    m.add_function(wrap_pyfunction!(psi_action, m)?)?;
    m.add_function(wrap_pyfunction!(diagonal_odd_part, m)?)?;
    m.add_function(wrap_pyfunction!(self_intersection_odd, m)?)?;
    m.add_function(wrap_pyfunction!(odd_report, m)?)?;
    m.add_function(wrap_pyfunction!(covers, m)?)?;
    m.add_function(wrap_pyfunction!(witness, m)?)?;
    Ok(())
}
