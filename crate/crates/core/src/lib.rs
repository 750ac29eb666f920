//! Exact statevector simulation of spin-amplifier measurement protocols.
//!
//! A single target spin is read out through the collective magnetization of a
//! small chain of amplifier spins. The crate builds the dipolar and
//! grade-raising Hamiltonians, evolves pure states exactly (dense
//! eigendecomposition or Lanczos/Krylov), runs the four amplification schemes
//! and measures magnetization, contrast, Meyer–Wallach entanglement and branch
//! fidelity.
//!
//! Conventions used throughout:
//!
//! * qubit 0 is the least significant bit of a basis-state index;
//! * bit value 0 is `|0⟩`, the σz eigenstate with eigenvalue +1, so the fully
//!   polarized state `|0…0⟩` has magnetization `n`;
//! * σ⁺ = `|0⟩⟨1|` and σ⁻ = `|1⟩⟨0|`;
//! * all times are dimensionless products such as `t·b₁₂`.

pub mod error;
pub mod hamiltonians;
pub mod metrics;
pub mod propagate;
pub mod protocols;
pub mod statevec;

pub use error::{Result, SpinError};
pub use hamiltonians::{CouplingModel, Geometry, HamiltonianOperator, PauliLabel, PauliTerm};
pub use metrics::{branch_fidelity, contrast, magnetization, meyer_wallach, ObservableRecord};
pub use propagate::{
    controlled_evolve, effective_propagator, expm_apply, gate_cnot, gate_rotation,
    unitary_equal_on_inputs, unitary_equal_up_to_phase, Axis, Circuit, Evolution, ExpMethod,
    ExpParams, PhaseReport, Step, UnitaryPropagator,
};
pub use protocols::{
    run_random_map, run_scheme, run_scheme_cat_gate, run_scheme_cat_nq, run_scheme_cnot_chain,
    run_sweep, scheme_circuit, scheme_contrast, target_flip_propagator, ContrastReport,
    KickConvention, LogFit, MapOrder, MapParams, Mode, ProtocolSpec, Saturation, Scheme,
    SchemeOutcome, SweepRow, SweepTable, TargetState, TraceResult,
};
pub use statevec::{QubitRegister, ReducedDensity};

/// Complex amplitude type.
pub type C64 = num_complex::Complex64;

/// Dense complex matrix type used for operators and propagators.
pub type CMatrix = nalgebra::DMatrix<C64>;
