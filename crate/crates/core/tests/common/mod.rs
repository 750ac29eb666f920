#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spinamp::{CMatrix, PauliLabel, QubitRegister, C64};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_complex(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

pub fn random_state(n: usize, rng: &mut ChaCha8Rng) -> QubitRegister {
    let amps = (0..1usize << n).map(|_| random_complex(rng)).collect();
    QubitRegister::from_amplitudes(amps).unwrap()
}

pub fn random_matrix(d: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    DMatrix::from_fn(d, d, |_, _| random_complex(rng))
}

pub fn random_hermitian(d: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let a = random_matrix(d, rng);
    (&a + a.adjoint()) * C64::new(0.5, 0.0)
}

/// Haar-ish unitary from the QR factor of a random complex matrix.
pub fn random_unitary(d: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    random_matrix(d, rng).qr().q()
}

pub fn random_couplings(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut b = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let v = rng.random_range(-2.0..2.0);
            b[i * n + j] = v;
            b[j * n + i] = v;
        }
    }
    b
}

pub fn column(state: &QubitRegister) -> nalgebra::DVector<C64> {
    nalgebra::DVector::from_column_slice(state.amplitudes())
}

pub fn single(label: PauliLabel) -> CMatrix {
    let m = label.matrix();
    DMatrix::from_fn(2, 2, |i, j| m[i][j])
}

/// `⊗_q op_q` with qubit 0 as the rightmost Kronecker factor.
pub fn kron_string(n: usize, ops: &[(usize, PauliLabel)]) -> CMatrix {
    let mut m = CMatrix::from_element(1, 1, C64::new(1.0, 0.0));
    for q in 0..n {
        let label = ops
            .iter()
            .find(|(qq, _)| *qq == q)
            .map(|(_, l)| *l)
            .unwrap_or(PauliLabel::I);
        m = single(label).kronecker(&m);
    }
    m
}

/// Single-qubit operator embedded as `I ⊗ op ⊗ I`.
pub fn kron_embed_1q(n: usize, op: &CMatrix, q: usize) -> CMatrix {
    let high = CMatrix::identity(1 << (n - q - 1), 1 << (n - q - 1));
    let low = CMatrix::identity(1 << q, 1 << q);
    high.kronecker(&op.kronecker(&low))
}

/// Dense `exp(−iHt)` by Taylor series with scaling and squaring.
pub fn expm_taylor(h: &CMatrix, t: f64) -> CMatrix {
    let d = h.nrows();
    let norm = h.norm() * t.abs();
    let squarings = if norm > 0.25 {
        (norm / 0.25).log2().ceil() as u32
    } else {
        0
    };
    let a = h * C64::new(0.0, -t / f64::from(1u32 << squarings));
    let mut term = CMatrix::identity(d, d);
    let mut sum = term.clone();
    for k in 1..40 {
        term = &term * &a * C64::new(1.0 / k as f64, 0.0);
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

pub fn cat_state(n: usize) -> QubitRegister {
    let mut amps = vec![C64::new(0.0, 0.0); 1 << n];
    amps[0] = C64::new(1.0, 0.0);
    amps[(1 << n) - 1] = C64::new(0.0, -1.0);
    QubitRegister::from_amplitudes(amps).unwrap()
}

pub fn max_abs_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// `E⁺_T ⊗ ∏X + E⁻_T ⊗ I` with the target on qubit `n`, `E⁺ = |1⟩⟨1|`.
pub fn ideal_flip(n: usize) -> spinamp::UnitaryPropagator {
    let dim = 1usize << (n + 1);
    let all = (1usize << n) - 1;
    let mut m = CMatrix::zeros(dim, dim);
    for col in 0..dim {
        let row = if col >> n & 1 == 1 { col ^ all } else { col };
        m[(row, col)] = C64::new(1.0, 0.0);
    }
    spinamp::UnitaryPropagator {
        n_qubits: n + 1,
        matrix: m,
    }
}

/// Inputs `|s⟩_T|0…0⟩` for `s ∈ {0, 1}`.
pub fn protocol_inputs(n: usize) -> Vec<QubitRegister> {
    [0usize, 1]
        .iter()
        .map(|&s| QubitRegister::basis_index(n + 1, s << n).unwrap())
        .collect()
}
