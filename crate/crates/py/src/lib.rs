//! Python bindings for `connectif`.
//!
//! Sets cross the boundary as lists of element labels, sieves as lists of
//! sets, and rationals as strings such as `"-3/7"`.

#![allow(clippy::useless_conversion)]

use connectif::interval::{self, ChainWitness, RationalInterval};
use connectif::io;
use connectif::sheaf::{self, validate_presheaf};
use connectif::site::{self, AxiomViolation, SamplingMode, Sieve, DEFAULT_CAP};
use connectif::structure::StructureViolation;
use connectif::{ConnectivityStructure, Error, GeneratorFamily, GroundSet, SubsetMask};
use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

create_exception!(
    connectif_py,
    CapExceeded,
    PyRuntimeError,
    "An enumeration cap was exceeded."
);

fn to_py(err: Error) -> PyErr {
    match err {
        Error::CapExceeded { .. } => CapExceeded::new_err(err.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

type Labels = Vec<String>;

fn labels(g: &GroundSet, m: SubsetMask) -> Labels {
    g.labels(m).into_iter().map(String::from).collect()
}

fn sieve_labels(g: &GroundSet, s: &Sieve) -> Vec<Labels> {
    s.members().iter().map(|&m| labels(g, m)).collect()
}

fn mask(g: &GroundSet, set: &[String]) -> PyResult<SubsetMask> {
    g.mask_of(set).map_err(to_py)
}

fn rational(text: &str) -> PyResult<interval::Rational> {
    io::parse_rational(text).map_err(to_py)
}

fn closed(pair: (String, String)) -> PyResult<RationalInterval> {
    RationalInterval::closed(rational(&pair.0)?, rational(&pair.1)?).map_err(to_py)
}

fn describe(g: &GroundSet, v: &StructureViolation) -> String {
    match v {
        StructureViolation::MissingEmpty => "∅ is missing".into(),
        StructureViolation::MissingUnion { left, right, union } => {
            format!("{} ∪ {} = {} is missing", g.show(*left), g.show(*right), g.show(*union))
        }
    }
}

/// A finite connectivity structure.
#[pyclass(name = "Structure", module = "connectif_py", frozen)]
#[derive(Clone)]
struct PyStructure {
    inner: ConnectivityStructure,
}

#[pymethods]
impl PyStructure {
    /// Build from an explicit family. `∅` is added; the family must be closed.
    #[new]
    fn new(elements: Labels, sets: Vec<Labels>) -> PyResult<Self> {
        let g = GroundSet::new(elements).map_err(to_py)?;
        let family = sets.iter().map(|s| mask(&g, s)).collect::<PyResult<_>>()?;
        let inner = ConnectivityStructure::new(g, family).map_err(to_py)?;
        Ok(PyStructure { inner })
    }

    /// Connected vertex sets of a simple graph.
    #[staticmethod]
    fn from_graph(vertices: Labels, edges: Vec<(String, String)>) -> PyResult<Self> {
        let inner = ConnectivityStructure::from_graph(&vertices, &edges).map_err(to_py)?;
        Ok(PyStructure { inner })
    }

    /// Smallest structure containing the generators.
    #[staticmethod]
    fn generate(elements: Labels, generators: Vec<Labels>) -> PyResult<Self> {
        let g = GroundSet::new(elements).map_err(to_py)?;
        let gens = generators.iter().map(|s| mask(&g, s)).collect::<PyResult<_>>()?;
        let family = GeneratorFamily::new(g, gens).map_err(to_py)?;
        Ok(PyStructure {
            inner: connectif::generate_structure(&family),
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = io::parse_space(text).map_err(to_py)?;
        Ok(PyStructure { inner })
    }

    fn to_json(&self) -> String {
        io::serialize_space(&self.inner)
    }

    #[getter]
    fn elements(&self) -> Labels {
        self.inner.ground().names().to_vec()
    }

    /// Connected sets in canonical order, `∅` first.
    fn sets(&self) -> Vec<Labels> {
        let g = self.inner.ground();
        self.inner.family().iter().map(|&m| labels(g, m)).collect()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __contains__(&self, set: Labels) -> PyResult<bool> {
        Ok(self.inner.contains(mask(self.inner.ground(), &set)?))
    }

    fn __repr__(&self) -> String {
        format!(
            "Structure({} elements, {} connected sets)",
            self.inner.ground().len(),
            self.inner.len()
        )
    }

    fn induced(&self, set: Labels) -> PyResult<Self> {
        let a = mask(self.inner.ground(), &set)?;
        let inner = self.inner.induced(a).map_err(to_py)?;
        Ok(PyStructure { inner })
    }

    fn is_integral(&self) -> bool {
        self.inner.is_integral()
    }

    fn is_irreducible(&self, set: Labels) -> PyResult<bool> {
        let a = mask(self.inner.ground(), &set)?;
        self.inner.irreducible_by_definition(a).map_err(to_py)
    }

    fn irreducibles(&self) -> Vec<Labels> {
        let g = self.inner.ground();
        self.inner.irreducibles().into_iter().map(|m| labels(g, m)).collect()
    }

    #[pyo3(signature = (on, covering = false, cap = DEFAULT_CAP))]
    fn sieves(&self, on: Labels, covering: bool, cap: usize) -> PyResult<Vec<Vec<Labels>>> {
        let g = self.inner.ground();
        let a = mask(g, &on)?;
        let sieves = if covering {
            site::covering_sieves(&self.inner, a, cap)
        } else {
            site::enumerate_sieves(&self.inner, a, cap)
        }
        .map_err(to_py)?;
        Ok(sieves.iter().map(|s| sieve_labels(g, s)).collect())
    }

    /// Covering sieves of every connected set, as `(set, sieves)` pairs.
    #[pyo3(signature = (cap = DEFAULT_CAP))]
    fn covering_table(&self, cap: usize) -> PyResult<Vec<(Labels, Vec<Vec<Labels>>)>> {
        let g = self.inner.ground();
        let table = site::covering_table(&self.inner, cap).map_err(to_py)?;
        Ok(table
            .iter()
            .map(|(a, covers)| (labels(g, a), covers.iter().map(|s| sieve_labels(g, s)).collect()))
            .collect())
    }

    /// One dict per axiom. Exhaustive unless both `samples` and `seed` are given.
    #[pyo3(signature = (samples = None, seed = None, cap = DEFAULT_CAP))]
    fn verify_axioms<'py>(
        &self,
        py: Python<'py>,
        samples: Option<usize>,
        seed: Option<u64>,
        cap: usize,
    ) -> PyResult<Vec<Bound<'py, PyDict>>> {
        let mode = match (samples, seed) {
            (None, None) => SamplingMode::Exhaustive,
            (Some(samples), Some(seed)) => SamplingMode::Randomized { samples, seed },
            _ => return Err(PyValueError::new_err("samples and seed go together")),
        };
        let g = self.inner.ground();
        let reports = site::verify_axioms(&self.inner, mode, cap).map_err(to_py)?;
        reports
            .iter()
            .map(|r| {
                let d = PyDict::new_bound(py);
                d.set_item("axiom", r.axiom.name())?;
                d.set_item("passed", r.passed())?;
                d.set_item("instances", r.instances)?;
                let violations: Vec<Labels> = r
                    .violations
                    .iter()
                    .map(|v| match v {
                        AxiomViolation::Maximality { object }
                        | AxiomViolation::Stability { object, .. }
                        | AxiomViolation::Transitivity { object, .. } => labels(g, *object),
                    })
                    .collect();
                d.set_item("violations", violations)?;
                Ok(d)
            })
            .collect()
    }
}

/// Violations of the structure axioms for an explicit family, as text.
#[pyfunction]
fn validate(elements: Labels, sets: Vec<Labels>) -> PyResult<Vec<String>> {
    let g = GroundSet::new(elements).map_err(to_py)?;
    let mut family: Vec<SubsetMask> = sets.iter().map(|s| mask(&g, s)).collect::<PyResult<_>>()?;
    family.push(SubsetMask::EMPTY);
    let report = connectif::validate_structure(&g, &family).map_err(to_py)?;
    Ok(report.violations.iter().map(|v| describe(&g, v)).collect())
}

/// A set-valued presheaf on a structure.
#[pyclass(name = "Presheaf", module = "connectif_py", frozen)]
struct PyPresheaf {
    inner: sheaf::Presheaf,
}

#[pymethods]
impl PyPresheaf {
    #[staticmethod]
    fn terminal(structure: &PyStructure) -> Self {
        PyPresheaf {
            inner: sheaf::Presheaf::terminal(&structure.inner),
        }
    }

    #[staticmethod]
    fn constant(structure: &PyStructure, labels: Labels) -> PyResult<Self> {
        let inner = sheaf::Presheaf::constant(&structure.inner, &labels).map_err(to_py)?;
        Ok(PyPresheaf { inner })
    }

    /// All functions from each connected set to `values`.
    #[staticmethod]
    fn functions_to(structure: &PyStructure, values: Labels) -> PyResult<Self> {
        let inner = sheaf::Presheaf::functions_to(&structure.inner, &values).map_err(to_py)?;
        Ok(PyPresheaf { inner })
    }

    #[staticmethod]
    fn from_json(structure: &PyStructure, text: &str) -> PyResult<Self> {
        let inner = io::parse_presheaf(text, &structure.inner).map_err(to_py)?;
        Ok(PyPresheaf { inner })
    }

    fn to_json(&self) -> String {
        io::PresheafFile::from_presheaf(&self.inner).to_json()
    }

    fn sections(&self, set: Labels) -> PyResult<Labels> {
        let k = self.inner.structure();
        let a = mask(k.ground(), &set)?;
        k.require(a).map_err(to_py)?;
        Ok(self.inner.sections(a).to_vec())
    }

    fn is_functorial(&self) -> PyResult<bool> {
        let report = validate_presheaf(&self.inner, self.inner.structure()).map_err(to_py)?;
        Ok(report.is_ok())
    }

    /// Sheaf verdict with the first counterexample in canonical order.
    #[pyo3(signature = (cap = DEFAULT_CAP))]
    fn is_sheaf<'py>(&self, py: Python<'py>, cap: usize) -> PyResult<Bound<'py, PyDict>> {
        let k = self.inner.structure();
        let g = k.ground();
        let table = site::covering_table(k, cap).map_err(to_py)?;
        let verdict = sheaf::is_sheaf(&self.inner, k, &table, cap).map_err(to_py)?;
        let d = PyDict::new_bound(py);
        d.set_item("sheaf", verdict.is_sheaf())?;
        d.set_item("families_checked", verdict.families_checked)?;
        match &verdict.counterexample {
            None => d.set_item("counterexample", py.None())?,
            Some(cx) => {
                let cxd = PyDict::new_bound(py);
                cxd.set_item("object", labels(g, cx.object))?;
                cxd.set_item("sieve", sieve_labels(g, &cx.sieve))?;
                let family: Vec<(Labels, String)> = cx
                    .family
                    .assignment
                    .iter()
                    .map(|&(m, s)| (labels(g, m), self.inner.sections(m)[s].clone()))
                    .collect();
                cxd.set_item("family", family)?;
                cxd.set_item("amalgamations", cx.amalgamations)?;
                d.set_item("counterexample", cxd)?;
            }
        }
        Ok(d)
    }
}

/// Chain of closed pieces shorter than `epsilon` covering `target`.
#[pyfunction]
fn build_witness(target: (String, String), epsilon: &str) -> PyResult<Vec<(String, String)>> {
    let w = interval::build_witness(&closed(target)?, &rational(epsilon)?).map_err(to_py)?;
    Ok(w.pieces
        .iter()
        .filter_map(|p| p.bounds().map(|(lo, hi)| (lo.to_string(), hi.to_string())))
        .collect())
}

/// `None` when the pieces certify the target, otherwise the defect.
#[pyfunction]
fn witness_defect(target: (String, String), epsilon: &str, pieces: Vec<(String, String)>) -> PyResult<Option<String>> {
    let w = ChainWitness {
        target: closed(target)?,
        epsilon: rational(epsilon)?,
        pieces: pieces.into_iter().map(closed).collect::<PyResult<_>>()?,
    };
    Ok(interval::witness_defect(&w).map(|d| d.to_string()))
}

#[pymodule]
fn connectif_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyStructure>()?;
    m.add_class::<PyPresheaf>()?;
    m.add_function(wrap_pyfunction!(validate, m)?)?;
    m.add_function(wrap_pyfunction!(build_witness, m)?)?;
    m.add_function(wrap_pyfunction!(witness_defect, m)?)?;
    m.add("CapExceeded", m.py().get_type_bound::<CapExceeded>())?;
    m.add("DEFAULT_CAP", DEFAULT_CAP)?;
    Ok(())
}
