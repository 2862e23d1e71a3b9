//! Python module `dicke`: thin wrappers over `dicke_core`.

use dicke_core::{self as core, Error};
use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Config(_) | Error::Domain(_) | Error::InvalidRegime(_) | Error::Json(_) => {
            PyValueError::new_err(e.to_string())
        }
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

#[pyclass(name = "SystemParams", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PySystemParams(core::SystemParams);

#[pymethods]
impl PySystemParams {
    /// Lab constants, with the cavity given by its `A^2`-dressed frequency.
    #[new]
    #[pyo3(signature = (omega0=1.0, omega_c_prime=1.0, g0=0.06, n_qubits=2, chi=0.0))]
    fn new(omega0: f64, omega_c_prime: f64, g0: f64, n_qubits: u32, chi: f64) -> PyResult<Self> {
        core::SystemParams::with_dressed_cavity(omega0, omega_c_prime, g0, n_qubits, chi)
            .map(Self)
            .map_err(to_py)
    }

    #[getter]
    fn omega0(&self) -> f64 {
        self.0.omega0
    }
    #[getter]
    fn omega_c(&self) -> f64 {
        self.0.omega_c
    }
    #[getter]
    fn omega_c_prime(&self) -> f64 {
        self.0.omega_c_prime()
    }
    #[getter]
    fn g0(&self) -> f64 {
        self.0.g0
    }
    #[getter]
    fn n_qubits(&self) -> u32 {
        self.0.n_qubits
    }
    #[getter]
    fn chi(&self) -> f64 {
        self.0.chi
    }
    #[getter]
    fn g_a2(&self) -> f64 {
        self.0.g_a2()
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.0)
    }
}

#[pyclass(name = "ModulationParams", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyModulationParams(core::ModulationParams);

#[pymethods]
impl PyModulationParams {
    #[new]
    fn new(xi: f64, nu: f64) -> PyResult<Self> {
        core::ModulationParams::new(xi, nu).map(Self).map_err(to_py)
    }
    #[getter]
    fn xi(&self) -> f64 {
        self.0.xi
    }
    #[getter]
    fn nu(&self) -> f64 {
        self.0.nu
    }
    fn __repr__(&self) -> String {
        format!("{:?}", self.0)
    }
}

#[pyclass(name = "Sidebands", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PySidebands(core::Sidebands);

#[pymethods]
impl PySidebands {
    #[staticmethod]
    fn with_indices(sys: &PySystemParams, modulation: &PyModulationParams, n0: i32, m0: i32) -> Self {
        Self(core::Sidebands::with_indices(&sys.0, &modulation.0, n0, m0))
    }
    #[getter]
    fn n0(&self) -> i32 {
        self.0.n0
    }
    #[getter]
    fn m0(&self) -> i32 {
        self.0.m0
    }
    #[getter]
    fn delta_n0(&self) -> f64 {
        self.0.delta_n0
    }
    #[getter]
    fn big_delta_m0(&self) -> f64 {
        self.0.big_delta_m0
    }
    fn __repr__(&self) -> String {
        format!("{:?}", self.0)
    }
}

#[pyclass(name = "EffectiveModel", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyEffectiveModel(core::EffectiveModel);

#[pymethods]
impl PyEffectiveModel {
    #[new]
    fn new(omega0_tilde: f64, omega_c_tilde: f64, lambda_r: f64, lambda_cr: f64) -> Self {
        Self(core::EffectiveModel::from_couplings(omega0_tilde, omega_c_tilde, lambda_r, lambda_cr))
    }
    #[getter]
    fn omega0_tilde(&self) -> f64 {
        self.0.omega0_tilde
    }
    #[getter]
    fn omega_c_tilde(&self) -> f64 {
        self.0.omega_c_tilde
    }
    #[getter]
    fn lambda_r(&self) -> f64 {
        self.0.lambda_r
    }
    #[getter]
    fn lambda_cr(&self) -> f64 {
        self.0.lambda_cr
    }
    #[getter]
    fn lambda_crit(&self) -> Option<f64> {
        self.0.lambda_crit
    }
    #[getter]
    fn regime(&self) -> &'static str {
        self.0.regime().as_str()
    }
    fn with_couplings(&self, lambda_r: f64, lambda_cr: f64) -> Self {
        Self(self.0.with_couplings(lambda_r, lambda_cr))
    }
    fn __repr__(&self) -> String {
        format!(
            "EffectiveModel(omega0_tilde={}, omega_c_tilde={}, lambda_r={}, lambda_cr={})",
            self.0.omega0_tilde, self.0.omega_c_tilde, self.0.lambda_r, self.0.lambda_cr
        )
    }
}

#[pyfunction]
fn bessel_j(n: i32, x: f64) -> PyResult<f64> {
    core::bessel_j(n, x).map_err(to_py)
}

#[pyfunction]
fn sideband_select(sys: &PySystemParams, modulation: &PyModulationParams) -> PySidebands {
    PySidebands(core::sideband_select(&sys.0, &modulation.0))
}

#[pyfunction]
#[pyo3(signature = (sys, modulation, sidebands=None))]
fn effective_model(
    sys: &PySystemParams,
    modulation: &PyModulationParams,
    sidebands: Option<&PySidebands>,
) -> PyResult<PyEffectiveModel> {
    let sb = sidebands.map_or_else(|| core::sideband_select(&sys.0, &modulation.0), |s| s.0);
    core::effective_model(&sys.0, &modulation.0, &sb)
        .map(PyEffectiveModel)
        .map_err(to_py)
}

#[pyfunction]
fn classify(model: &PyEffectiveModel) -> PyResult<&'static str> {
    core::classify(&model.0).map(|p| p.label()).map_err(to_py)
}

/// Ground state as a dict: phase, alpha, beta (per sqrt(N)), theta, energy,
/// on_boundary.
#[pyfunction]
fn ground_state<'py>(py: Python<'py>, model: &PyEffectiveModel) -> PyResult<Bound<'py, PyDict>> {
    let gs = core::ground_state(&model.0).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("phase", gs.phase.label())?;
    d.set_item("alpha", gs.alpha_scaled)?;
    d.set_item("beta", gs.beta_scaled)?;
    d.set_item("theta", gs.theta)?;
    d.set_item("energy", gs.energy_per_qubit)?;
    d.set_item("on_boundary", gs.on_boundary)?;
    Ok(d)
}

#[pyfunction]
fn classical_energy(model: &PyEffectiveModel, alpha: Complex64, beta: Complex64) -> PyResult<f64> {
    core::classical_energy(&model.0, alpha, beta).map_err(to_py)
}

/// Quasiparticle frequencies about the ground state.
#[pyfunction]
fn spectrum<'py>(py: Python<'py>, model: &PyEffectiveModel) -> PyResult<Bound<'py, PyDict>> {
    let (gs, sp) = core::analyse(&model.0).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("phase", gs.phase.label())?;
    d.set_item("omega_minus", sp.omega_minus)?;
    d.set_item("omega_plus", sp.omega_plus)?;
    d.set_item("stable", sp.stable)?;
    Ok(d)
}

#[pyfunction]
#[pyo3(signature = (sys, modulation, sidebands=None, threshold=0.1, n_max=32))]
fn rwa_report<'py>(
    py: Python<'py>,
    sys: &PySystemParams,
    modulation: &PyModulationParams,
    sidebands: Option<&PySidebands>,
    threshold: f64,
    n_max: i32,
) -> PyResult<Bound<'py, PyDict>> {
    let sb = sidebands.map_or_else(|| core::sideband_select(&sys.0, &modulation.0), |s| s.0);
    let r = core::rwa_report(&sys.0, &modulation.0, &sb, threshold, n_max).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("worst_sideband_ratio", r.worst_sideband_ratio)?;
    d.set_item(
        "worst_sideband",
        r.worst_sideband_id.map(|id| {
            let branch = match id.branch {
                core::reduction::Branch::Rotating => "rotating",
                core::reduction::Branch::CounterRotating => "counter_rotating",
            };
            (branch, id.index)
        }),
    )?;
    d.set_item("a2_ratio", r.a2_ratio)?;
    d.set_item("threshold", r.threshold)?;
    d.set_item("tie", r.tie)?;
    d.set_item("pass", r.pass)?;
    Ok(d)
}

/// Lab-frame fidelity of the effective evolution from the vacuum state.
#[pyfunction]
#[pyo3(signature = (sys, modulation, fock_dim=24, dt=0.01, t_final=50.0, samples=501))]
fn compare_fidelity<'py>(
    py: Python<'py>,
    sys: &PySystemParams,
    modulation: &PyModulationParams,
    fock_dim: usize,
    dt: f64,
    t_final: f64,
    samples: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let cfg = core::SimConfig {
        dt,
        t_final,
        samples,
        ..core::SimConfig::new(sys.0.n_qubits, fock_dim)
    };
    let sb = core::sideband_select(&sys.0, &modulation.0);
    let r = py
        .detach(|| core::compare_fidelity(&cfg, &sys.0, &modulation.0, &sb))
        .map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("times", r.times)?;
    d.set_item("fidelity", r.fidelity)?;
    d.set_item("min_fidelity", r.min_fidelity)?;
    d.set_item("max_norm_drift", r.max_norm_drift)?;
    d.set_item("warning", r.warning)?;
    Ok(d)
}

#[pyfunction]
fn finite_n_gap(py: Python<'_>, model: &PyEffectiveModel, n_qubits: u32, fock_dim: usize) -> PyResult<f64> {
    let m = model.0;
    py.detach(|| core::finite_n_gap(&m, n_qubits, fock_dim)).map_err(to_py)
}

/// Runs a CLI command and returns its main document as text.
#[pyfunction]
#[pyo3(signature = (command, config_json="{}"))]
fn run(py: Python<'_>, command: &str, config_json: &str) -> PyResult<String> {
    let cfg = core::ScanConfig::from_json(config_json).map_err(to_py)?;
    let cmd: core::Command = command.parse().map_err(to_py)?;
    let out = py.detach(|| core::run(cmd, &cfg)).map_err(to_py)?;
    Ok(out.primary.render(cfg.format))
}

#[pymodule]
fn dicke(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySystemParams>()?;
    m.add_class::<PyModulationParams>()?;
    m.add_class::<PySidebands>()?;
    m.add_class::<PyEffectiveModel>()?;
    m.add_function(wrap_pyfunction!(bessel_j, m)?)?;
    m.add_function(wrap_pyfunction!(sideband_select, m)?)?;
    m.add_function(wrap_pyfunction!(effective_model, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(ground_state, m)?)?;
    m.add_function(wrap_pyfunction!(classical_energy, m)?)?;
    m.add_function(wrap_pyfunction!(spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(rwa_report, m)?)?;
    m.add_function(wrap_pyfunction!(compare_fidelity, m)?)?;
    m.add_function(wrap_pyfunction!(finite_n_gap, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    Ok(())
}
