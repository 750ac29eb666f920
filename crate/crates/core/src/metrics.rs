//! Collective observables of the amplifier.

use crate::error::{Result, SpinError};
use crate::statevec::QubitRegister;

/// Observables recorded for one state (or one pair of branches).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ObservableRecord {
    /// Magnetization in spin quanta, in `[−n, n]`.
    pub mz: f64,
    /// Meyer–Wallach entanglement, in `[0, 1]`.
    pub q: f64,
    pub fidelity: f64,
    pub contrast: f64,
}

/// `Σ_{i∈qubits} ⟨σz^i⟩`, with `|0⟩` counting +1.
pub fn magnetization(state: &QubitRegister, qubits: &[usize]) -> Result<f64> {
    let n = state.n_qubits();
    let mut mask = 0usize;
    for &q in qubits {
        if q >= n {
            return Err(SpinError::IndexOutOfRange { index: q, n });
        }
        mask |= 1 << q;
    }
    let k = qubits.len() as i64;
    Ok(state
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(idx, a)| {
            let down = (idx & mask).count_ones() as i64;
            a.norm_sqr() * (k - 2 * down) as f64
        })
        .sum())
}

/// Magnetization over every qubit of the register.
pub fn total_magnetization(state: &QubitRegister) -> f64 {
    let all: Vec<usize> = (0..state.n_qubits()).collect();
    magnetization(state, &all).expect("indices are in range")
}

/// `(Mz⁰ − Mz¹)/Mz(0)`.
pub fn contrast(mz0: f64, mz1: f64, mz_init: f64) -> Result<f64> {
    if mz_init == 0.0 {
        return Err(SpinError::ZeroMagnetization);
    }
    Ok((mz0 - mz1) / mz_init)
}

/// Meyer–Wallach `Q = 2 − (2/n)Σ_i Tr ρ_i²` over single-spin reductions.
pub fn meyer_wallach(state: &QubitRegister) -> f64 {
    let n = state.n_qubits();
    let purity_sum: f64 = (0..n)
        .map(|i| state.reduce_single(i).expect("index in range").purity())
        .sum();
    2.0 - 2.0 * purity_sum / n as f64
}

/// `|⟨a|b⟩|²`.
pub fn branch_fidelity(a: &QubitRegister, b: &QubitRegister) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr())
}
