//! Unitary evolution, gates, circuits and dense effective propagators.

mod expm;

pub use expm::{dense_propagator, expm_apply, Evolution, ExpMethod, ExpParams};

use crate::error::{Result, SpinError};
use crate::hamiltonians::HamiltonianOperator;
use crate::statevec::QubitRegister;
use crate::{CMatrix, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    /// `exp(−i(angle/2)σ_axis)`.
    pub fn rotation_matrix(self, angle: f64) -> [[C64; 2]; 2] {
        let (s, c) = (0.5 * angle).sin_cos();
        let (c, s) = (C64::new(c, 0.0), s);
        match self {
            Axis::X => [[c, C64::new(0.0, -s)], [C64::new(0.0, -s), c]],
            Axis::Y => [[c, C64::new(-s, 0.0)], [C64::new(s, 0.0), c]],
            Axis::Z => [
                [C64::from_polar(1.0, -0.5 * angle), C64::new(0.0, 0.0)],
                [C64::new(0.0, 0.0), C64::from_polar(1.0, 0.5 * angle)],
            ],
        }
    }
}

/// Standard CNOT.
pub fn gate_cnot(control: usize, target: usize, state: &mut QubitRegister) -> Result<()> {
    if control == target {
        return Err(SpinError::RepeatedIndex(control));
    }
    state.apply_cnot(control, target)
}

/// `exp(−i(angle/2)σ_axis)` on each listed qubit.
pub fn gate_rotation(
    axis: Axis,
    angle: f64,
    qubits: &[usize],
    state: &mut QubitRegister,
) -> Result<()> {
    if qubits.is_empty() {
        return Err(SpinError::InvalidParameter(
            "rotation needs at least one qubit".into(),
        ));
    }
    let m = axis.rotation_matrix(angle);
    for &q in qubits {
        state.apply_1q(&m, q)?;
    }
    Ok(())
}

/// `E⁺_control ⊗ exp(−iHt) + E⁻_control ⊗ I`, with `E⁺ = |1⟩⟨1|`.
pub fn controlled_evolve(
    control: usize,
    h: &HamiltonianOperator,
    t: f64,
    state: &QubitRegister,
    params: &ExpParams,
) -> Result<QubitRegister> {
    let ce = ControlledEvolution::new(control, h, t, params)?;
    let mut out = state.clone();
    ce.apply(&mut out)?;
    Ok(out)
}

/// Precomputed controlled evolution, reusable across repetitions.
#[derive(Clone, Debug)]
pub struct ControlledEvolution {
    control: usize,
    inner: Evolution,
}

impl ControlledEvolution {
    pub fn new(
        control: usize,
        h: &HamiltonianOperator,
        t: f64,
        params: &ExpParams,
    ) -> Result<Self> {
        if control >= h.n_spins() {
            return Err(SpinError::IndexOutOfRange {
                index: control,
                n: h.n_spins(),
            });
        }
        if h.support().contains(&control) {
            return Err(SpinError::ControlInSupport(control));
        }
        Ok(Self {
            control,
            inner: Evolution::new(h, t, params)?,
        })
    }

    pub fn apply(&self, state: &mut QubitRegister) -> Result<()> {
        if state.dim() != self.inner.dim() {
            return Err(SpinError::DimensionMismatch {
                expected: self.inner.dim(),
                got: state.dim(),
            });
        }
        let mask = 1usize << self.control;
        let on: Vec<C64> = state
            .amplitudes()
            .iter()
            .enumerate()
            .map(|(i, &a)| if i & mask != 0 { a } else { C64::new(0.0, 0.0) })
            .collect();
        if on.iter().all(|a| a.norm_sqr() == 0.0) {
            return Ok(());
        }
        let evolved = self.inner.apply_vec(&on)?;
        for (i, a) in state.amplitudes_mut().iter_mut().enumerate() {
            if i & mask != 0 {
                *a = evolved[i];
            }
        }
        Ok(())
    }
}

/// One step of a circuit.
#[derive(Clone, Debug)]
pub enum Step {
    Rotation {
        axis: Axis,
        angle: f64,
        qubits: Vec<usize>,
    },
    Cnot {
        control: usize,
        target: usize,
    },
    Evolve {
        h: HamiltonianOperator,
        t: f64,
    },
    ControlledEvolve {
        control: usize,
        h: HamiltonianOperator,
        t: f64,
    },
}

impl Step {
    fn inverse(&self) -> Self {
        match self {
            Step::Rotation {
                axis,
                angle,
                qubits,
            } => Step::Rotation {
                axis: *axis,
                angle: -angle,
                qubits: qubits.clone(),
            },
            Step::Cnot { .. } => self.clone(),
            Step::Evolve { h, t } => Step::Evolve {
                h: h.clone(),
                t: -t,
            },
            Step::ControlledEvolve { control, h, t } => Step::ControlledEvolve {
                control: *control,
                h: h.clone(),
                t: -t,
            },
        }
    }
}

/// Ordered gate/evolution sequence; the first step acts first.
#[derive(Clone, Debug, Default)]
pub struct Circuit {
    n_qubits: usize,
    steps: Vec<Step>,
}

enum Compiled<'a> {
    Rotation([[C64; 2]; 2], &'a [usize]),
    Cnot(usize, usize),
    Evolve(Evolution),
    Controlled(ControlledEvolution),
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            steps: Vec::new(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn push(&mut self, step: Step) -> &mut Self {
        self.steps.push(step);
        self
    }

    pub fn extend(&mut self, other: &Circuit) -> &mut Self {
        self.steps.extend(other.steps.iter().cloned());
        self
    }

    pub fn inverse(&self) -> Self {
        Self {
            n_qubits: self.n_qubits,
            steps: self.steps.iter().rev().map(Step::inverse).collect(),
        }
    }

    fn compile(&self, params: &ExpParams) -> Result<Vec<Compiled<'_>>> {
        self.steps
            .iter()
            .map(|step| {
                Ok(match step {
                    Step::Rotation {
                        axis,
                        angle,
                        qubits,
                    } => {
                        if qubits.is_empty() {
                            return Err(SpinError::InvalidParameter(
                                "rotation needs at least one qubit".into(),
                            ));
                        }
                        Compiled::Rotation(axis.rotation_matrix(*angle), qubits)
                    }
                    Step::Cnot { control, target } => {
                        if control == target {
                            return Err(SpinError::RepeatedIndex(*control));
                        }
                        Compiled::Cnot(*control, *target)
                    }
                    Step::Evolve { h, t } => {
                        if h.n_spins() != self.n_qubits {
                            return Err(SpinError::DimensionMismatch {
                                expected: 1 << self.n_qubits,
                                got: h.dim(),
                            });
                        }
                        Compiled::Evolve(Evolution::new(h, *t, params)?)
                    }
                    Step::ControlledEvolve { control, h, t } => {
                        Compiled::Controlled(ControlledEvolution::new(*control, h, *t, params)?)
                    }
                })
            })
            .collect()
    }

    fn run(compiled: &[Compiled<'_>], state: &mut QubitRegister) -> Result<()> {
        for step in compiled {
            match step {
                Compiled::Rotation(m, qubits) => {
                    for &q in *qubits {
                        state.apply_1q(m, q)?;
                    }
                }
                Compiled::Cnot(c, t) => state.apply_cnot(*c, *t)?,
                Compiled::Evolve(e) => e.apply(state)?,
                Compiled::Controlled(ce) => ce.apply(state)?,
            }
        }
        Ok(())
    }

    pub fn apply(&self, state: &mut QubitRegister, params: &ExpParams) -> Result<()> {
        if state.n_qubits() != self.n_qubits {
            return Err(SpinError::DimensionMismatch {
                expected: 1 << self.n_qubits,
                got: state.dim(),
            });
        }
        let compiled = self.compile(params)?;
        Self::run(&compiled, state)
    }
}

/// Dense unitary, used for small-register equivalence checks.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryPropagator {
    pub n_qubits: usize,
    pub matrix: CMatrix,
}

impl UnitaryPropagator {
    pub fn identity(n_qubits: usize) -> Self {
        let d = 1 << n_qubits;
        Self {
            n_qubits,
            matrix: CMatrix::identity(d, d),
        }
    }

    /// ‖U†U − I‖_F.
    pub fn unitarity_residual(&self) -> f64 {
        let d = self.matrix.nrows();
        (self.matrix.adjoint() * &self.matrix - CMatrix::identity(d, d)).norm()
    }

    pub fn apply(&self, state: &QubitRegister) -> Result<QubitRegister> {
        if state.n_qubits() != self.n_qubits {
            return Err(SpinError::DimensionMismatch {
                expected: self.matrix.nrows(),
                got: state.dim(),
            });
        }
        let v = nalgebra::DVector::from_column_slice(state.amplitudes());
        Ok(QubitRegister::from_raw(
            self.n_qubits,
            (&self.matrix * v).data.into(),
        ))
    }
}

/// Dense unitary of a circuit, one column per basis input.
pub fn effective_propagator(circuit: &Circuit, params: &ExpParams) -> Result<UnitaryPropagator> {
    let n = circuit.n_qubits();
    let dim = 1usize << n;
    if dim > params.dense_cap {
        return Err(SpinError::DenseCapExceeded {
            dim,
            cap: params.dense_cap,
        });
    }
    let compiled = circuit.compile(params)?;
    let mut matrix = CMatrix::zeros(dim, dim);
    for col in 0..dim {
        let mut s = QubitRegister::basis_index(n, col)?;
        Circuit::run(&compiled, &mut s)?;
        for (row, a) in s.amplitudes().iter().enumerate() {
            matrix[(row, col)] = *a;
        }
    }
    Ok(UnitaryPropagator {
        n_qubits: n,
        matrix,
    })
}

/// Outcome of an up-to-global-phase comparison.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseReport {
    pub equal: bool,
    /// Phase φ in (−π, π] minimizing ‖u − e^{iφ}v‖.
    pub phase: f64,
    pub residual: f64,
}

/// `‖u − e^{iφ}v‖_F < tol` for the optimal `φ = arg Tr(v†u)`.
pub fn unitary_equal_up_to_phase(
    u: &UnitaryPropagator,
    v: &UnitaryPropagator,
    tol: f64,
) -> PhaseReport {
    if u.matrix.shape() != v.matrix.shape() {
        return PhaseReport {
            equal: false,
            phase: 0.0,
            residual: f64::INFINITY,
        };
    }
    let overlap: C64 = v
        .matrix
        .iter()
        .zip(u.matrix.iter())
        .map(|(a, b)| a.conj() * b)
        .sum();
    report(overlap, |rot| (&u.matrix - &v.matrix * rot).norm(), tol)
}

/// Weaker comparison: `u|s⟩` against `e^{iφ}v|s⟩` over the supplied inputs,
/// with one common phase.
pub fn unitary_equal_on_inputs(
    u: &UnitaryPropagator,
    v: &UnitaryPropagator,
    inputs: &[QubitRegister],
    tol: f64,
) -> Result<PhaseReport> {
    let mut outs = Vec::with_capacity(inputs.len());
    let mut overlap = C64::new(0.0, 0.0);
    for s in inputs {
        let a = u.apply(s)?;
        let b = v.apply(s)?;
        overlap += b.inner(&a)?;
        outs.push((a, b));
    }
    Ok(report(
        overlap,
        |rot| {
            outs.iter()
                .map(|(a, b)| {
                    a.amplitudes()
                        .iter()
                        .zip(b.amplitudes())
                        .map(|(x, y)| (x - y * rot).norm_sqr())
                        .sum::<f64>()
                })
                .sum::<f64>()
                .sqrt()
        },
        tol,
    ))
}

fn report(overlap: C64, residual_at: impl Fn(C64) -> f64, tol: f64) -> PhaseReport {
    let phase = if overlap.norm() > 0.0 {
        overlap.arg()
    } else {
        0.0
    };
    let residual = residual_at(C64::from_polar(1.0, phase));
    PhaseReport {
        equal: residual < tol,
        phase,
        residual,
    }
}
