//! Python bindings. Potentials and initial profiles are passed as dicts with a
//! `kind` key, matching the scenario files.

use gpred::confined3d::{reduction_sweep, InitialProfile, ReductionScenario};
use gpred::gpe1d::{Gpe1d, Schedule};
use gpred::grid::Grid1;
use gpred::harness::{run_scenario, validate_admissibility, ScenarioConfig};
use gpred::manybody::{alpha_functional, assemble_orbital, HamiltonianSpec, ManyBodyState, WeightTable};
use gpred::potential::{ExternalPotential, TransversePotential};
use gpred::scattering::{build_correction, solve_zero_energy, CorrectionProfile, RadialPotential, StepControl};
use gpred::transverse::{coupling_b, ground_state_for, TransverseMode};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde_json::Value;

fn err(e: gpred::Error) -> PyErr {
    match e {
        gpred::Error::Domain(_) | gpred::Error::Config { .. } => PyValueError::new_err(e.to_string()),
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

fn to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Value::Number(n) => match n.as_i64() {
            Some(i) => i.into_pyobject(py)?.into_any(),
            None => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any(),
        },
        Value::String(s) => s.into_pyobject(py)?.into_any(),
        Value::Array(a) => {
            let list = PyList::empty(py);
            for x in a {
                list.append(to_py(py, x)?)?;
            }
            list.into_any()
        }
        Value::Object(o) => {
            let d = PyDict::new(py);
            for (k, x) in o {
                d.set_item(k, to_py(py, x)?)?;
            }
            d.into_any()
        }
    })
}

fn from_py<T: serde::de::DeserializeOwned>(obj: &Bound<'_, PyAny>) -> PyResult<T> {
    let json = obj.py().import("json")?.call_method1("dumps", (obj,))?.extract::<String>()?;
    serde_json::from_str(&json).map_err(|e| PyValueError::new_err(e.to_string()))
}

/// Radial interaction profile on the unit scale.
#[pyclass(name = "RadialPotential", frozen)]
struct PyRadialPotential(RadialPotential);

#[pymethods]
impl PyRadialPotential {
    #[staticmethod]
    fn square_barrier(height: f64) -> PyResult<Self> {
        RadialPotential::square_barrier(height).map(Self).map_err(err)
    }

    #[staticmethod]
    fn smooth_bump(height: f64) -> PyResult<Self> {
        RadialPotential::smooth_bump(height).map(Self).map_err(err)
    }

    fn __call__(&self, s: f64) -> f64 {
        self.0.eval(s)
    }

    /// Zero-energy scattering solution at interaction scale `mu`.
    #[pyo3(signature = (mu = 1.0))]
    fn solve(&self, mu: f64) -> PyResult<Scattering> {
        solve_zero_energy(&self.0, mu, StepControl::default()).map(Scattering).map_err(err)
    }
}

#[pyclass(frozen)]
struct Scattering(gpred::scattering::ScatteringSolution);

#[pymethods]
impl Scattering {
    #[getter]
    fn a(&self) -> f64 {
        self.0.a
    }

    #[getter]
    fn a_mu(&self) -> f64 {
        self.0.a_mu
    }

    #[getter]
    fn identity_residual(&self) -> f64 {
        self.0.identity_residual
    }

    fn j(&self, r: f64) -> f64 {
        self.0.j(r)
    }

    fn correction(&self, beta_tilde: f64) -> PyResult<Correction> {
        build_correction(&self.0, beta_tilde).map(Correction).map_err(err)
    }
}

/// Shell-corrected scattering pair.
#[pyclass(frozen)]
struct Correction(CorrectionProfile);

#[pymethods]
impl Correction {
    #[getter]
    fn kappa(&self) -> f64 {
        self.0.kappa
    }

    #[getter]
    fn r(&self) -> f64 {
        self.0.r
    }

    #[getter]
    fn r_inner(&self) -> f64 {
        self.0.r_inner
    }

    #[getter]
    fn u_height(&self) -> f64 {
        self.0.u_height
    }

    fn kappa_upper(&self) -> f64 {
        self.0.kappa_upper()
    }

    fn f(&self, r: f64) -> f64 {
        self.0.f(r)
    }

    fn coupling_integral(&self) -> f64 {
        self.0.coupling_integral()
    }
}

/// Transverse ground state of `-Δ + V⊥` on an `n × n` grid.
#[pyclass(name = "TransverseMode", frozen)]
struct PyTransverseMode(TransverseMode);

#[pymethods]
impl PyTransverseMode {
    #[new]
    #[pyo3(signature = (v_perp, n, length, tol = 1e-14))]
    fn new(v_perp: &Bound<'_, PyAny>, n: usize, length: f64, tol: f64) -> PyResult<Self> {
        let v: TransversePotential = from_py(v_perp)?;
        ground_state_for(&v, n, length, tol).map(Self).map_err(err)
    }

    #[getter]
    fn e0(&self) -> f64 {
        self.0.e0
    }

    #[getter]
    fn quartic(&self) -> f64 {
        self.0.quartic
    }

    #[getter]
    fn chi(&self) -> Vec<f64> {
        self.0.chi.clone()
    }

    fn coupling_b(&self, a: f64) -> PyResult<f64> {
        coupling_b(a, &self.0).map_err(err)
    }
}

type Evolved<'py> = (Vec<f64>, Vec<f64>, Vec<f64>, Bound<'py, PyAny>);

/// Evolves the 1D equation; returns `(x, re, im, samples)`.
#[pyfunction]
#[pyo3(signature = (nx, lx, b, phi0, t_final, dt, potential = None, stride = 1))]
#[allow(clippy::too_many_arguments)]
fn evolve_1d<'py>(
    py: Python<'py>,
    nx: usize,
    lx: f64,
    b: f64,
    phi0: &Bound<'py, PyAny>,
    t_final: f64,
    dt: f64,
    potential: Option<&Bound<'py, PyAny>>,
    stride: usize,
) -> PyResult<Evolved<'py>> {
    let grid = Grid1::new(nx, lx).map_err(err)?;
    let v: ExternalPotential = potential.map(from_py).transpose()?.unwrap_or_default();
    let profile: InitialProfile = from_py(phi0)?;
    let traj = py
        .detach(|| Gpe1d::new(grid, v, b).evolve(&profile.build(grid), Schedule { t_final, dt, stride }, false))
        .map_err(err)?;
    let f = &traj.final_state;
    let samples = serde_json::to_value(&traj.samples).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok((grid.points(), f.values.iter().map(|z| z.re).collect(), f.values.iter().map(|z| z.im).collect(), to_py(py, &samples)?))
}

/// Runs a dimensional-reduction sweep; `scenario` mirrors a `[reduce3d]` section plus `a`.
#[pyfunction]
fn reduce3d<'py>(py: Python<'py>, scenario: &Bound<'py, PyAny>, epsilons: Vec<f64>) -> PyResult<Bound<'py, PyAny>> {
    let s: ReductionScenario = from_py(scenario)?;
    let table = py.detach(|| reduction_sweep(&s, &epsilons)).map_err(err)?;
    to_py(py, &serde_json::to_value(&table).map_err(|e| PyRuntimeError::new_err(e.to_string()))?)
}

/// Counting weights `m(0..=N)`.
#[pyfunction]
fn weights(n: usize, xi: f64) -> PyResult<Vec<f64>> {
    WeightTable::new(n, xi).map(|t| t.m).map_err(err)
}

/// Counting functional of the product state of a Gaussian on a periodic line.
#[pyfunction]
#[pyo3(signature = (n, xi, nx = 32, lx = 12.0))]
fn product_alpha(n: usize, xi: f64, nx: usize, lx: f64) -> PyResult<f64> {
    let grid = Grid1::new(nx, lx).map_err(err)?;
    let spec = HamiltonianSpec::line(grid);
    let phi = InitialProfile::Gaussian { width: 1.0, center: 0.0, momentum: 0.0 }.build(grid);
    let orbital = assemble_orbital(&spec.space, &phi, None).map_err(err)?;
    let w = WeightTable::new(n, xi).map_err(err)?;
    let psi = ManyBodyState::product(&orbital, n);
    alpha_functional(&psi, &phi, None, &w, &spec).map(|r| r.alpha).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (sequence, delta, d = None, beta_tilde = None, tail_fraction = 0.1))]
fn admissibility<'py>(
    py: Python<'py>,
    sequence: Vec<(f64, f64)>,
    delta: f64,
    d: Option<f64>,
    beta_tilde: Option<f64>,
    tail_fraction: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let r = validate_admissibility(&sequence, delta, d.zip(beta_tilde), tail_fraction).map_err(err)?;
    to_py(py, &serde_json::to_value(&r).map_err(|e| PyRuntimeError::new_err(e.to_string()))?)
}

/// Runs a scenario file and returns its summary.
#[pyfunction]
fn run<'py>(py: Python<'py>, config: std::path::PathBuf, out: std::path::PathBuf) -> PyResult<Bound<'py, PyAny>> {
    let cfg = ScenarioConfig::load(&config).map_err(err)?;
    let outcome = py.detach(|| run_scenario(&cfg, &out)).map_err(err)?;
    to_py(py, &serde_json::to_value(&outcome.summary).map_err(|e| PyRuntimeError::new_err(e.to_string()))?)
}

#[pymodule]
fn gpred_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyRadialPotential>()?;
    m.add_class::<Scattering>()?;
    m.add_class::<Correction>()?;
    m.add_class::<PyTransverseMode>()?;
    m.add_function(wrap_pyfunction!(evolve_1d, m)?)?;
    m.add_function(wrap_pyfunction!(reduce3d, m)?)?;
    m.add_function(wrap_pyfunction!(weights, m)?)?;
    m.add_function(wrap_pyfunction!(product_alpha, m)?)?;
    m.add_function(wrap_pyfunction!(admissibility, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    Ok(())
}
