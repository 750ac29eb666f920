//! Python bindings: registers, Hamiltonians, exponentials and the protocols.

use std::collections::HashMap;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use spinamp::hamiltonians::{self, DEFAULT_DENSE_CAP};
use spinamp::{
    CouplingModel, ExpMethod, ExpParams, HamiltonianOperator, KickConvention, MapOrder, MapParams,
    Mode, ProtocolSpec, Scheme, SpinError, TargetState, TraceResult, C64,
};

fn err(e: SpinError) -> PyErr {
    if e.is_computational() {
        PyRuntimeError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn parse<T: Copy>(what: &str, s: &str, options: &[(&str, T)]) -> PyResult<T> {
    options
        .iter()
        .find(|(name, _)| *name == s)
        .map(|(_, v)| *v)
        .ok_or_else(|| {
            let names: Vec<&str> = options.iter().map(|(n, _)| *n).collect();
            PyValueError::new_err(format!("{what} must be one of {names:?}, got {s:?}"))
        })
}

fn scheme(s: &str) -> PyResult<Scheme> {
    s.parse().map_err(err)
}

fn mode(s: &str) -> PyResult<Mode> {
    match s {
        "full" => Ok(Mode::Full),
        "reduced" => Ok(Mode::Reduced),
        _ => Err(PyValueError::new_err(format!(
            "mode must be 'full' or 'reduced', got {s:?}"
        ))),
    }
}

fn target(bit: u8) -> PyResult<TargetState> {
    match bit {
        0 => Ok(TargetState::Zero),
        1 => Ok(TargetState::One),
        _ => Err(PyValueError::new_err("target must be 0 or 1")),
    }
}

fn exp_params(method: &str) -> PyResult<ExpParams> {
    let method = match method {
        "auto" => ExpMethod::Auto,
        "dense" => ExpMethod::DenseEig,
        "krylov" => ExpMethod::Krylov,
        _ => {
            return Err(PyValueError::new_err(format!(
                "method must be 'auto', 'dense' or 'krylov', got {method:?}"
            )))
        }
    };
    Ok(ExpParams {
        method,
        ..ExpParams::default()
    })
}

fn chain(n: usize, b0: f64, decay_exponent: f64) -> PyResult<CouplingModel> {
    CouplingModel::linear_chain(n, b0, decay_exponent).map_err(err)
}

/// Statevector of `n` qubits; qubit 0 is the least significant bit.
#[pyclass(name = "QubitRegister", module = "spinamp_py", from_py_object)]
#[derive(Clone)]
struct PyRegister(spinamp::QubitRegister);

#[pymethods]
impl PyRegister {
    #[staticmethod]
    fn zeros(n: usize) -> PyResult<Self> {
        spinamp::QubitRegister::zeros(n).map(Self).map_err(err)
    }

    /// Bitstring with the most significant qubit first.
    #[staticmethod]
    fn basis_state(n: usize, bits: &str) -> PyResult<Self> {
        spinamp::QubitRegister::basis_state(n, bits)
            .map(Self)
            .map_err(err)
    }

    /// Normalizes the given amplitudes.
    #[staticmethod]
    fn from_amplitudes(amps: Vec<C64>) -> PyResult<Self> {
        spinamp::QubitRegister::from_amplitudes(amps)
            .map(Self)
            .map_err(err)
    }

    #[getter]
    fn n_qubits(&self) -> usize {
        self.0.n_qubits()
    }

    fn amplitudes(&self) -> Vec<C64> {
        self.0.amplitudes().to_vec()
    }

    fn probability(&self, index: usize) -> f64 {
        self.0.probability(index)
    }

    #[pyo3(signature = (qubits=None))]
    fn magnetization(&self, qubits: Option<Vec<usize>>) -> PyResult<f64> {
        let qs = qubits.unwrap_or_else(|| (0..self.0.n_qubits()).collect());
        spinamp::magnetization(&self.0, &qs).map_err(err)
    }

    fn meyer_wallach(&self) -> f64 {
        spinamp::meyer_wallach(&self.0)
    }

    fn fidelity(&self, other: &PyRegister) -> PyResult<f64> {
        spinamp::branch_fidelity(&self.0, &other.0).map_err(err)
    }

    /// Single-spin reduced density matrix as nested lists.
    fn reduce_single(&self, qubit: usize) -> PyResult<Vec<Vec<C64>>> {
        let r = self.0.reduce_single(qubit).map_err(err)?;
        Ok(r.matrix.iter().map(|row| row.to_vec()).collect())
    }

    fn __repr__(&self) -> String {
        format!("QubitRegister(n_qubits={})", self.0.n_qubits())
    }
}

#[pyclass(name = "Hamiltonian", module = "spinamp_py", from_py_object)]
#[derive(Clone)]
struct PyHamiltonian(HamiltonianOperator);

#[pymethods]
impl PyHamiltonian {
    /// Dipolar chain with `b_ij = b0/|i-j|^decay_exponent`.
    #[staticmethod]
    #[pyo3(signature = (n, b0=1.0, decay_exponent=3.0))]
    fn dipolar(n: usize, b0: f64, decay_exponent: f64) -> PyResult<Self> {
        hamiltonians::dipolar(&chain(n, b0, decay_exponent)?)
            .map(Self)
            .map_err(err)
    }

    /// Two-body grade-raising operator on the same chain.
    #[staticmethod]
    #[pyo3(signature = (n, b0=1.0, decay_exponent=3.0))]
    fn gr2(n: usize, b0: f64, decay_exponent: f64) -> PyResult<Self> {
        hamiltonians::gr2(&chain(n, b0, decay_exponent)?)
            .map(Self)
            .map_err(err)
    }

    /// Grade-raising terms that touch spin `first`.
    #[staticmethod]
    #[pyo3(signature = (n, first=0, b0=1.0, decay_exponent=3.0))]
    fn gr1(n: usize, first: usize, b0: f64, decay_exponent: f64) -> PyResult<Self> {
        hamiltonians::gr1(&chain(n, b0, decay_exponent)?, first)
            .map(Self)
            .map_err(err)
    }

    /// `coeff (prod s+ + prod s-)`.
    #[staticmethod]
    #[pyo3(signature = (n, coeff=1.0))]
    fn grn(n: usize, coeff: f64) -> PyResult<Self> {
        hamiltonians::grn(n, coeff).map(Self).map_err(err)
    }

    #[getter]
    fn n_spins(&self) -> usize {
        self.0.n_spins()
    }

    fn to_dense(&self) -> PyResult<Vec<Vec<C64>>> {
        let m = self.0.to_dense(DEFAULT_DENSE_CAP).map_err(err)?;
        Ok((0..m.nrows())
            .map(|r| m.row(r).iter().copied().collect())
            .collect())
    }

    fn apply(&self, state: &PyRegister) -> PyResult<Vec<C64>> {
        self.0.apply(state.0.amplitudes()).map_err(err)
    }

    fn expectation(&self, state: &PyRegister) -> PyResult<f64> {
        Ok(self.0.expectation(state.0.amplitudes()).map_err(err)?.re)
    }

    /// Conjugation by a π/2 y-rotation of every spin.
    fn rotate_y90(&self) -> PyResult<Self> {
        self.0.rotate_y90(DEFAULT_DENSE_CAP).map(Self).map_err(err)
    }

    /// `exp(-iHt)|state>`.
    #[pyo3(signature = (state, t, method="auto"))]
    fn evolve(&self, state: &PyRegister, t: f64, method: &str) -> PyResult<PyRegister> {
        spinamp::expm_apply(&self.0, t, &state.0, &exp_params(method)?)
            .map(PyRegister)
            .map_err(err)
    }
}

/// Contrast and final-state observables of a non-iterated scheme.
#[pyfunction]
#[pyo3(signature = (scheme_name, n, mode_name="full"))]
fn scheme_contrast(scheme_name: &str, n: usize, mode_name: &str) -> PyResult<HashMap<String, f64>> {
    let spec = ProtocolSpec::new(scheme(scheme_name)?, n, TargetState::One, mode(mode_name)?);
    let r = spinamp::scheme_contrast(&spec, &ExpParams::default()).map_err(err)?;
    Ok(HashMap::from([
        ("mz0".into(), r.mz0),
        ("mz1".into(), r.mz1),
        ("contrast".into(), r.contrast),
        ("q0".into(), r.q0),
        ("q1".into(), r.q1),
        ("fidelity".into(), r.fidelity),
    ]))
}

/// Final amplifier state of a non-iterated scheme.
#[pyfunction]
#[pyo3(signature = (scheme_name, n, target_bit, mode_name="reduced"))]
fn run_scheme(
    scheme_name: &str,
    n: usize,
    target_bit: u8,
    mode_name: &str,
) -> PyResult<PyRegister> {
    let spec = ProtocolSpec::new(
        scheme(scheme_name)?,
        n,
        target(target_bit)?,
        mode(mode_name)?,
    );
    spinamp::run_scheme(&spec, &ExpParams::default())
        .map(|o| PyRegister(o.amplifier))
        .map_err(err)
}

#[allow(clippy::too_many_arguments)]
fn map_params(
    n: usize,
    r_max: usize,
    t_pert: f64,
    t_free: f64,
    decay_exponent: f64,
    map_order: &str,
    kick_convention: &str,
) -> PyResult<MapParams> {
    Ok(MapParams {
        t_pert,
        t_free,
        r_max,
        couplings: chain(n, 1.0, decay_exponent)?,
        map_order: parse(
            "map_order",
            map_order,
            &[
                ("dipolar-first", MapOrder::DipolarFirst),
                ("kick-first", MapOrder::KickFirst),
            ],
        )?,
        kick_convention: parse(
            "kick_convention",
            kick_convention,
            &[
                ("projector", KickConvention::Projector),
                ("pauli-sum", KickConvention::PauliSum),
            ],
        )?,
    })
}

/// Column name to per-repetition values.
type Trace = HashMap<String, Vec<f64>>;
type SweepRow = (usize, usize, Option<usize>, f64, f64, f64);

fn trace_dict(t: &TraceResult) -> Trace {
    HashMap::from([
        ("mz0".into(), t.mz0.clone()),
        ("mz1".into(), t.mz1.clone()),
        ("contrast".into(), t.contrast.clone()),
        ("q0".into(), t.q0.clone()),
        ("q1".into(), t.q1.clone()),
        ("fidelity".into(), t.fidelity.clone()),
    ])
}

/// Per-repetition observables of the perturbed map and the first repetition
/// reaching `threshold`.
#[pyfunction]
#[pyo3(signature = (
    n, r_max=300, threshold=0.9, t_pert=MapParams::DEFAULT_T_PERT, t_free=MapParams::DEFAULT_T_FREE,
    decay_exponent=3.0, map_order="dipolar-first", kick_convention="pauli-sum", mode_name="reduced"
))]
#[allow(clippy::too_many_arguments)]
fn run_random_map(
    py: Python<'_>,
    n: usize,
    r_max: usize,
    threshold: f64,
    t_pert: f64,
    t_free: f64,
    decay_exponent: f64,
    map_order: &str,
    kick_convention: &str,
    mode_name: &str,
) -> PyResult<(Trace, Option<usize>)> {
    let params = map_params(
        n,
        r_max,
        t_pert,
        t_free,
        decay_exponent,
        map_order,
        kick_convention,
    )?;
    let spec = ProtocolSpec::new(Scheme::RandomMap, n, TargetState::One, mode(mode_name)?);
    let t = py
        .detach(|| spinamp::run_random_map(&spec, &params, threshold, &ExpParams::default()))
        .map_err(err)?;
    Ok((trace_dict(&t), t.r_star))
}

/// One row per size: `(n, N, r_star, contrast_sat, q_sat, fidelity_sat)`.
#[pyfunction]
#[pyo3(signature = (ns, r_max=300, threshold=0.9, decay_exponent=3.0, kick_convention="pauli-sum"))]
fn run_sweep(
    py: Python<'_>,
    ns: Vec<usize>,
    r_max: usize,
    threshold: f64,
    decay_exponent: f64,
    kick_convention: &str,
) -> PyResult<Vec<SweepRow>> {
    let first = *ns
        .first()
        .ok_or_else(|| PyValueError::new_err("ns is empty"))?;
    let base = map_params(
        first,
        r_max,
        MapParams::DEFAULT_T_PERT,
        MapParams::DEFAULT_T_FREE,
        decay_exponent,
        "dipolar-first",
        kick_convention,
    )?;
    let table = py
        .detach(|| spinamp::run_sweep(&ns, &base, 0, threshold, &ExpParams::default()))
        .map_err(err)?;
    Ok(table
        .rows
        .iter()
        .map(|r| {
            (
                r.n,
                r.dim,
                r.r_star,
                r.contrast_sat,
                r.q_sat,
                r.fidelity_sat,
            )
        })
        .collect())
}

#[pymodule]
fn spinamp_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyRegister>()?;
    m.add_class::<PyHamiltonian>()?;
    m.add_function(wrap_pyfunction!(scheme_contrast, m)?)?;
    m.add_function(wrap_pyfunction!(run_scheme, m)?)?;
    m.add_function(wrap_pyfunction!(run_random_map, m)?)?;
    m.add_function(wrap_pyfunction!(run_sweep, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
