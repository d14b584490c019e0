//! Python module `dfsqec`: density matrices, noise models, scenario sweeps
//! and closed-form reference curves.

use dfsqec::channels::{self, CouplingCase, NoiseKind};
use dfsqec::codes::{self, Scenario};
use dfsqec::experiments::{self, ScenarioConfig};
use dfsqec::metrics::{self, Axis, Curve};
use dfsqec::qstate::{self, CMatrix, StateKind, C64};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse<T: std::str::FromStr>(s: &str) -> PyResult<T>
where
    T::Err: std::fmt::Display,
{
    s.parse::<T>().map_err(value_err)
}

#[pyclass(name = "DensityMatrix", module = "dfsqec", from_py_object)]
#[derive(Clone)]
struct PyDensityMatrix {
    inner: qstate::DensityMatrix,
}

#[pymethods]
impl PyDensityMatrix {
    /// Builds a state (trace 1, positive) or a traceless deviation from a
    /// square nested list of complex numbers.
    #[new]
    #[pyo3(signature = (rows, deviation = false))]
    fn new(rows: Vec<Vec<C64>>, deviation: bool) -> PyResult<Self> {
        let d = rows.len();
        if rows.iter().any(|r| r.len() != d) {
            return Err(PyValueError::new_err("matrix must be square"));
        }
        let m = CMatrix::from_fn(d, d, |r, c| rows[r][c]);
        let kind = if deviation { StateKind::Deviation } else { StateKind::State };
        qstate::DensityMatrix::new(m, kind).map(|inner| Self { inner }).map_err(value_err)
    }

    #[staticmethod]
    fn pure(ket: Vec<C64>) -> PyResult<Self> {
        qstate::DensityMatrix::pure(&ket).map(|inner| Self { inner }).map_err(value_err)
    }

    #[staticmethod]
    fn basis(n_qubits: usize, index: usize) -> Self {
        Self { inner: qstate::DensityMatrix::basis(n_qubits, index) }
    }

    #[staticmethod]
    fn maximally_mixed(n_qubits: usize) -> Self {
        Self { inner: qstate::DensityMatrix::maximally_mixed(n_qubits) }
    }

    #[getter]
    fn n_qubits(&self) -> usize {
        self.inner.n_qubits()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn trace(&self) -> C64 {
        self.inner.trace()
    }

    fn element(&self, row: usize, col: usize) -> PyResult<C64> {
        if row >= self.inner.dim() || col >= self.inner.dim() {
            return Err(PyValueError::new_err("index out of range"));
        }
        Ok(self.inner.element(row, col))
    }

    fn eigenvalues(&self) -> Vec<f64> {
        self.inner.eigenvalues()
    }

    fn to_list(&self) -> Vec<Vec<C64>> {
        let d = self.inner.dim();
        (0..d).map(|r| (0..d).map(|c| self.inner.element(r, c)).collect()).collect()
    }

    fn partial_trace(&self, keep: Vec<usize>) -> PyResult<Self> {
        qstate::partial_trace(&self.inner, &keep).map(|inner| Self { inner }).map_err(value_err)
    }

    fn tensor(&self, other: &Self) -> Self {
        Self { inner: self.inner.tensor(&other.inner) }
    }

    fn __repr__(&self) -> String {
        format!("DensityMatrix(n_qubits={}, trace={})", self.inner.n_qubits(), self.inner.trace().re)
    }
}

#[pyclass(name = "NoiseSpec", module = "dfsqec", from_py_object)]
#[derive(Clone)]
struct PyNoiseSpec {
    inner: channels::NoiseSpec,
}

#[pymethods]
impl PyNoiseSpec {
    /// Independent dephasing of strength `kappa0` on every carrier.
    #[staticmethod]
    #[pyo3(signature = (kappa0, kind = "sinc"))]
    fn independent(kappa0: f64, kind: &str) -> PyResult<Self> {
        Ok(Self { inner: channels::NoiseSpec::independent(kappa0, parse(kind)?) })
    }

    /// Independent noise plus collective noise of strength `kappa0/ratio`
    /// (sinc) or `kappa0/ratio²` (exp) on the DFS pair.
    #[staticmethod]
    #[pyo3(signature = (kappa0, ratio = 0.5, case = "a", kind = "sinc"))]
    fn hybrid(kappa0: f64, ratio: f64, case: &str, kind: &str) -> PyResult<Self> {
        Ok(Self { inner: channels::NoiseSpec::hybrid(kappa0, ratio, parse(case)?, parse(kind)?) })
    }

    #[getter]
    fn kappa0(&self) -> f64 {
        self.inner.kappa0
    }

    #[getter]
    fn ratio(&self) -> f64 {
        self.inner.ratio
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.inner.kind.as_str()
    }

    #[getter]
    fn case(&self) -> &'static str {
        self.inner.coupling_case.as_str()
    }

    #[getter]
    fn collective(&self) -> bool {
        self.inner.collective
    }

    /// `(label, weights, strength)` for each generator of the error model.
    fn generators(&self, n_qubits: usize) -> PyResult<Vec<(String, Vec<f64>, f64)>> {
        let gens = channels::build_error_model(&self.inner, n_qubits).map_err(value_err)?;
        Ok(gens.iter().map(|g| (g.label().to_string(), g.weights().to_vec(), g.strength())).collect())
    }

    /// Noise strength `λ` of the error model, reading strengths as rates.
    fn noise_strength(&self, n_qubits: usize) -> PyResult<f64> {
        let gens = channels::build_error_model(&self.inner, n_qubits).map_err(value_err)?;
        channels::noise_strength(&gens).map_err(value_err)
    }

    /// Applies the error model to `rho`.
    fn apply(&self, rho: &PyDensityMatrix) -> PyResult<PyDensityMatrix> {
        let gens = channels::build_error_model(&self.inner, rho.inner.n_qubits()).map_err(value_err)?;
        channels::apply_noise(&rho.inner, &gens, self.inner.kind)
            .map(|inner| PyDensityMatrix { inner })
            .map_err(value_err)
    }

    fn __repr__(&self) -> String {
        let s = &self.inner;
        format!(
            "NoiseSpec(kappa0={}, ratio={}, case='{}', kind='{}', collective={})",
            s.kappa0,
            s.ratio,
            s.coupling_case.as_str(),
            s.kind.as_str(),
            if s.collective { "True" } else { "False" }
        )
    }
}

/// Text listing of a scenario circuit, one step per line.
#[pyfunction]
fn circuit_text(scenario: &str, spec: &PyNoiseSpec) -> PyResult<String> {
    let circuit = codes::build_scenario_circuit(parse(scenario)?, &spec.inner).map_err(value_err)?;
    Ok(circuit.to_string())
}

/// Runs a scenario circuit on `rho`.
#[pyfunction]
fn run_circuit(scenario: &str, spec: &PyNoiseSpec, rho: &PyDensityMatrix) -> PyResult<PyDensityMatrix> {
    let circuit = codes::build_scenario_circuit(parse(scenario)?, &spec.inner).map_err(value_err)?;
    circuit.run(&rho.inner).map(|inner| PyDensityMatrix { inner }).map_err(value_err)
}

/// Pseudo-pure input deviation: `σ_axis` on the data qubit, partially
/// polarized `|0>` on the others.
#[pyfunction]
#[pyo3(signature = (axis, ancilla_purity = 1.0, n_qubits = 3))]
fn prepare_inputs(axis: &str, ancilla_purity: f64, n_qubits: usize) -> PyResult<PyDensityMatrix> {
    let axis: Axis = parse(axis)?;
    experiments::prepare_inputs(axis, ancilla_purity, n_qubits).map(|inner| PyDensityMatrix { inner }).map_err(value_err)
}

/// Sweeps a scenario and returns one dict of metrics per sweep value.
#[pyfunction]
#[pyo3(signature = (scenario, sweep, kind = "sinc", ratio = 0.5, case = "a", ancilla_purity = 1.0))]
fn run_scenario<'py>(
    py: Python<'py>,
    scenario: &str,
    sweep: Vec<f64>,
    kind: &str,
    ratio: f64,
    case: &str,
    ancilla_purity: f64,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let scenario: Scenario = parse(scenario)?;
    let config = ScenarioConfig {
        ratio,
        coupling_case: parse::<CouplingCase>(case)?,
        ancilla_purity,
        ..ScenarioConfig::new(scenario, parse::<NoiseKind>(kind)?, sweep)
    };
    let result = py.detach(|| experiments::run_scenario(&config)).map_err(value_err)?;
    result
        .rows
        .iter()
        .map(|row| {
            let d = PyDict::new(py);
            let r = &row.report;
            d.set_item("kappa0", row.kappa0)?;
            for (k, v) in [("Cx", r.cx), ("Cy", r.cy), ("Cz", r.cz), ("Fe", r.fe), ("Px", r.px), ("Py", r.py), ("Pz", r.pz), ("P", r.p)] {
                d.set_item(k, v)?;
            }
            d.set_item("Fe_analytic", r.fe_analytic)?;
            Ok(d)
        })
        .collect()
}

/// Closed-form fidelity for `curve` in {qec-independent, qec-strong, no-qec}.
#[pyfunction]
#[pyo3(signature = (curve, kappa0, ratio = 0.5))]
fn analytic_fe(curve: &str, kappa0: f64, ratio: f64) -> PyResult<f64> {
    if !(ratio > 0.0) {
        return Err(PyValueError::new_err("ratio must be > 0"));
    }
    Ok(match parse::<Curve>(curve)? {
        Curve::QecIndependent => metrics::analytic_fe_qec_independent(kappa0),
        Curve::QecStrong => metrics::analytic_fe_qec_strong(kappa0, kappa0 + kappa0 / ratio),
        Curve::NoQec => metrics::analytic_fe_no_qec(kappa0),
    })
}

/// `(1+ε)²/(1+ε²)`: qubit-3 strength of the single-environment coupling over
/// the two-environment one.
#[pyfunction]
fn coupling_strength_ratio(epsilon: f64) -> PyResult<f64> {
    channels::coupling_strength_ratio(epsilon).map_err(value_err)
}

#[pyfunction]
fn sinc(x: f64) -> f64 {
    channels::sinc(x)
}

#[pymodule]
#[pyo3(name = "dfsqec")]
fn dfsqec_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDensityMatrix>()?;
    m.add_class::<PyNoiseSpec>()?;
    m.add_function(wrap_pyfunction!(circuit_text, m)?)?;
    m.add_function(wrap_pyfunction!(run_circuit, m)?)?;
    m.add_function(wrap_pyfunction!(prepare_inputs, m)?)?;
    m.add_function(wrap_pyfunction!(run_scenario, m)?)?;
    m.add_function(wrap_pyfunction!(analytic_fe, m)?)?;
    m.add_function(wrap_pyfunction!(coupling_strength_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(sinc, m)?)?;
    Ok(())
}
