//! Pure-state register with matrix-free local operator kernels.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Result, SpinError};
use crate::C64;

/// Largest register the simulator accepts by default (16384 amplitudes).
pub const DEFAULT_MAX_QUBITS: usize = 14;

/// Normalization slack accepted when building a register from raw amplitudes.
const NORM_EPS: f64 = 1e-300;

/// Complex amplitudes over the `2^n` computational basis states.
///
/// Qubit 0 is the least significant bit of the basis index and bit value 0 is
/// `|0⟩` (σz = +1).
#[derive(Clone, Debug, PartialEq)]
pub struct QubitRegister {
    n_qubits: usize,
    amps: Vec<C64>,
}

impl QubitRegister {
    /// `|0…0⟩` on `n` qubits.
    pub fn zeros(n: usize) -> Result<Self> {
        Self::basis_index(n, 0)
    }

    /// Basis state from a bitstring written most significant qubit first, so
    /// `"10"` on two qubits sets qubit 1 and leaves qubit 0 in `|0⟩`.
    pub fn basis_state(n: usize, bits: &str) -> Result<Self> {
        Self::basis_state_capped(n, bits, DEFAULT_MAX_QUBITS)
    }

    pub fn basis_state_capped(n: usize, bits: &str, max_qubits: usize) -> Result<Self> {
        check_size(n, max_qubits)?;
        if bits.chars().count() != n || !bits.chars().all(|c| c == '0' || c == '1') {
            return Err(SpinError::InvalidBits(bits.to_string()));
        }
        let index = bits
            .chars()
            .fold(0usize, |acc, c| (acc << 1) | usize::from(c == '1'));
        Self::basis_index_capped(n, index, max_qubits)
    }

    pub fn basis_index(n: usize, index: usize) -> Result<Self> {
        Self::basis_index_capped(n, index, DEFAULT_MAX_QUBITS)
    }

    fn basis_index_capped(n: usize, index: usize, max_qubits: usize) -> Result<Self> {
        check_size(n, max_qubits)?;
        let dim = 1usize << n;
        if index >= dim {
            return Err(SpinError::DimensionMismatch {
                expected: dim,
                got: index + 1,
            });
        }
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        amps[index] = C64::new(1.0, 0.0);
        Ok(Self { n_qubits: n, amps })
    }

    /// Builds a register from raw amplitudes, normalizing them.
    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        let dim = amps.len();
        if dim < 2 || !dim.is_power_of_two() {
            return Err(SpinError::DimensionMismatch {
                expected: dim.next_power_of_two().max(2),
                got: dim,
            });
        }
        let n = dim.trailing_zeros() as usize;
        check_size(n, DEFAULT_MAX_QUBITS)?;
        let mut reg = Self { n_qubits: n, amps };
        reg.normalize()?;
        Ok(reg)
    }

    pub(crate) fn from_raw(n_qubits: usize, amps: Vec<C64>) -> Self {
        debug_assert_eq!(amps.len(), 1 << n_qubits);
        Self { n_qubits, amps }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalize(&mut self) -> Result<()> {
        let norm = self.norm_sqr().sqrt();
        if norm < NORM_EPS || !norm.is_finite() {
            return Err(SpinError::ZeroNorm);
        }
        let inv = 1.0 / norm;
        self.amps.iter_mut().for_each(|a| *a *= inv);
        Ok(())
    }

    pub fn probability(&self, index: usize) -> f64 {
        self.amps[index].norm_sqr()
    }

    /// Applies a one- or two-qubit operator in place.
    ///
    /// `targets[k]` is bit `k` of the row/column index of `op`, so for a
    /// 4×4 `op` on `[a, b]` the local index is `bit_a + 2·bit_b`.
    pub fn apply_local(&mut self, op: &DMatrix<C64>, targets: &[usize]) -> Result<()> {
        let k = targets.len();
        if k == 0 || k > 2 {
            return Err(SpinError::InvalidParameter(format!(
                "local operators act on 1 or 2 qubits, got {k} targets"
            )));
        }
        let local = 1usize << k;
        if op.nrows() != local || op.ncols() != local {
            return Err(SpinError::DimensionMismatch {
                expected: local,
                got: op.nrows().max(op.ncols()),
            });
        }
        self.check_targets(targets)?;
        match *targets {
            [q] => {
                let m = [[op[(0, 0)], op[(0, 1)]], [op[(1, 0)], op[(1, 1)]]];
                apply_1q(&mut self.amps, &m, q);
            }
            [a, b] => {
                let mut m = [[C64::new(0.0, 0.0); 4]; 4];
                for (r, row) in m.iter_mut().enumerate() {
                    for (c, v) in row.iter_mut().enumerate() {
                        *v = op[(r, c)];
                    }
                }
                apply_2q(&mut self.amps, &m, a, b);
            }
            _ => unreachable!(),
        }
        Ok(())
    }

    /// Applies a 2×2 matrix to qubit `q` without bounds or shape checks
    /// beyond the index.
    pub(crate) fn apply_1q(&mut self, m: &[[C64; 2]; 2], q: usize) -> Result<()> {
        self.check_targets(&[q])?;
        apply_1q(&mut self.amps, m, q);
        Ok(())
    }

    /// Flips `target` wherever `control` is set.
    pub(crate) fn apply_cnot(&mut self, control: usize, target: usize) -> Result<()> {
        self.check_targets(&[control, target])?;
        let cmask = 1usize << control;
        let tmask = 1usize << target;
        for i in 0..self.amps.len() {
            if i & cmask != 0 && i & tmask == 0 {
                self.amps.swap(i, i | tmask);
            }
        }
        Ok(())
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        if self.n_qubits != other.n_qubits {
            return Err(SpinError::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Reduced density matrix of qubit `i` with every other qubit traced out.
    pub fn reduce_single(&self, i: usize) -> Result<ReducedDensity> {
        if i >= self.n_qubits {
            return Err(SpinError::IndexOutOfRange {
                index: i,
                n: self.n_qubits,
            });
        }
        let mask = 1usize << i;
        let (mut p0, mut p1) = (0.0, 0.0);
        let mut coh = C64::new(0.0, 0.0);
        for idx in 0..self.amps.len() {
            if idx & mask == 0 {
                let a0 = self.amps[idx];
                let a1 = self.amps[idx | mask];
                p0 += a0.norm_sqr();
                p1 += a1.norm_sqr();
                coh += a0 * a1.conj();
            }
        }
        Ok(ReducedDensity {
            matrix: [[C64::new(p0, 0.0), coh], [coh.conj(), C64::new(p1, 0.0)]],
        })
    }

    /// Amplifier factor of a state whose qubit `qubit` is in basis state
    /// `bit` (or is projected onto it). The remaining qubits keep their order.
    pub fn condition_on(&self, qubit: usize, bit: bool) -> Result<Self> {
        if qubit >= self.n_qubits {
            return Err(SpinError::IndexOutOfRange {
                index: qubit,
                n: self.n_qubits,
            });
        }
        if self.n_qubits == 1 {
            return Err(SpinError::RegisterSize {
                n: 0,
                max: DEFAULT_MAX_QUBITS,
            });
        }
        let low = (1usize << qubit) - 1;
        let want = usize::from(bit) << qubit;
        let amps: Vec<C64> = (0..self.amps.len() / 2)
            .map(|j| {
                let idx = (j & low) | ((j & !low) << 1) | want;
                self.amps[idx]
            })
            .collect();
        let mut reg = Self::from_raw(self.n_qubits - 1, amps);
        reg.normalize()?;
        Ok(reg)
    }

    /// Tensor product `high ⊗ self`, placing `high` on the new top qubits.
    pub fn tensor_high(&self, high: &Self) -> Result<Self> {
        let n = self.n_qubits + high.n_qubits;
        check_size(n, DEFAULT_MAX_QUBITS)?;
        let mut amps = Vec::with_capacity(1 << n);
        for h in &high.amps {
            amps.extend(self.amps.iter().map(|l| h * l));
        }
        Ok(Self::from_raw(n, amps))
    }

    fn check_targets(&self, targets: &[usize]) -> Result<()> {
        for (k, &t) in targets.iter().enumerate() {
            if t >= self.n_qubits {
                return Err(SpinError::IndexOutOfRange {
                    index: t,
                    n: self.n_qubits,
                });
            }
            if targets[..k].contains(&t) {
                return Err(SpinError::RepeatedIndex(t));
            }
        }
        Ok(())
    }
}

pub(crate) fn check_size(n: usize, max: usize) -> Result<()> {
    if n == 0 || n > max {
        return Err(SpinError::RegisterSize { n, max });
    }
    Ok(())
}

fn apply_1q(amps: &mut [C64], m: &[[C64; 2]; 2], q: usize) {
    let stride = 1usize << q;
    for block in (0..amps.len()).step_by(stride << 1) {
        for i in block..block + stride {
            let a0 = amps[i];
            let a1 = amps[i + stride];
            amps[i] = m[0][0] * a0 + m[0][1] * a1;
            amps[i + stride] = m[1][0] * a0 + m[1][1] * a1;
        }
    }
}

fn apply_2q(amps: &mut [C64], m: &[[C64; 4]; 4], a: usize, b: usize) {
    let ma = 1usize << a;
    let mb = 1usize << b;
    for base in 0..amps.len() {
        if base & (ma | mb) != 0 {
            continue;
        }
        let idx = [base, base | ma, base | mb, base | ma | mb];
        let v = idx.map(|i| amps[i]);
        for (r, &out) in idx.iter().enumerate() {
            amps[out] = (0..4).map(|c| m[r][c] * v[c]).sum();
        }
    }
}

/// Single-spin reduced density matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReducedDensity {
    pub matrix: [[Complex64; 2]; 2],
}

impl ReducedDensity {
    pub fn trace(&self) -> C64 {
        self.matrix[0][0] + self.matrix[1][1]
    }

    /// Tr ρ².
    pub fn purity(&self) -> f64 {
        let m = &self.matrix;
        (m[0][0] * m[0][0] + m[0][1] * m[1][0] + m[1][0] * m[0][1] + m[1][1] * m[1][1]).re
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let a = self.matrix[0][0].re;
        let d = self.matrix[1][1].re;
        let off = self.matrix[0][1].norm();
        let mid = 0.5 * (a + d);
        let half = (0.25 * (a - d) * (a - d) + off * off).sqrt();
        [mid - half, mid + half]
    }

    /// ⟨σz⟩ = ρ₀₀ − ρ₁₁.
    pub fn sigma_z(&self) -> f64 {
        self.matrix[0][0].re - self.matrix[1][1].re
    }

    pub fn hermiticity_residual(&self) -> f64 {
        let m = &self.matrix;
        (m[0][1] - m[1][0].conj())
            .norm()
            .max(m[0][0].im.abs())
            .max(m[1][1].im.abs())
    }
}
