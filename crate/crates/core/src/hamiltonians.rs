//! Spin Hamiltonians as sums of Pauli-string terms.
//!
//! The builders here produce the secular dipolar coupling, the two-body
//! grade-raising (double-quantum) operator, its restriction to pairs that
//! contain one distinguished spin, and the pure n-body grade-raising operator
//! `∏σ⁺ + ∏σ⁻`. Operators stay matrix-free unless materialized, except for
//! collective rotations, which are carried out densely.

use std::collections::BTreeMap;

use crate::error::{Result, SpinError};
use crate::statevec::check_size;
use crate::{CMatrix, C64};

/// Default cap on the dimension of any dense matrix (12 spins).
pub const DEFAULT_DENSE_CAP: usize = 4096;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PauliLabel {
    I,
    X,
    Y,
    Z,
    /// σ⁺ = |0⟩⟨1|
    Plus,
    /// σ⁻ = |1⟩⟨0|
    Minus,
}

impl PauliLabel {
    /// Image of basis bit `bit` under the single-qubit operator, as
    /// `(new_bit, factor)`, or `None` when the operator annihilates it.
    #[inline]
    fn act(self, bit: bool) -> Option<(bool, C64)> {
        match (self, bit) {
            (PauliLabel::I, b) => Some((b, ONE)),
            (PauliLabel::X, b) => Some((!b, ONE)),
            (PauliLabel::Y, false) => Some((true, C64::new(0.0, 1.0))),
            (PauliLabel::Y, true) => Some((false, C64::new(0.0, -1.0))),
            (PauliLabel::Z, false) => Some((false, ONE)),
            (PauliLabel::Z, true) => Some((true, -ONE)),
            (PauliLabel::Plus, true) => Some((false, ONE)),
            (PauliLabel::Minus, false) => Some((true, ONE)),
            (PauliLabel::Plus, false) | (PauliLabel::Minus, true) => None,
        }
    }

    fn adjoint(self) -> Self {
        match self {
            PauliLabel::Plus => PauliLabel::Minus,
            PauliLabel::Minus => PauliLabel::Plus,
            other => other,
        }
    }

    /// The 2×2 matrix, rows indexed by the output bit.
    pub fn matrix(self) -> [[C64; 2]; 2] {
        let mut m = [[ZERO; 2]; 2];
        for col in [false, true] {
            if let Some((row, f)) = self.act(col) {
                m[usize::from(row)][usize::from(col)] = f;
            }
        }
        m
    }
}

/// `coeff · ⊗_q label_q` with identities implied off the support.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliTerm {
    pub coeff: C64,
    /// (qubit, label) pairs sorted by qubit, no identities, no repeats.
    ops: Vec<(usize, PauliLabel)>,
}

impl PauliTerm {
    pub fn new(coeff: C64, ops: &[(usize, PauliLabel)]) -> Result<Self> {
        let mut ops: Vec<_> = ops
            .iter()
            .copied()
            .filter(|(_, l)| *l != PauliLabel::I)
            .collect();
        ops.sort_by_key(|(q, _)| *q);
        if let Some(w) = ops.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(SpinError::RepeatedIndex(w[0].0));
        }
        Ok(Self { coeff, ops })
    }

    pub fn ops(&self) -> &[(usize, PauliLabel)] {
        &self.ops
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.ops.iter().map(|(q, _)| *q)
    }

    pub fn adjoint(&self) -> Self {
        Self {
            coeff: self.coeff.conj(),
            ops: self.ops.iter().map(|&(q, l)| (q, l.adjoint())).collect(),
        }
    }

    /// Image of basis state `b`: `(b', amplitude)` with `term|b⟩ = amplitude |b'⟩`.
    #[inline]
    fn act(&self, b: usize) -> Option<(usize, C64)> {
        let mut out = b;
        let mut f = self.coeff;
        for &(q, l) in &self.ops {
            let (nb, g) = l.act(b >> q & 1 == 1)?;
            if nb {
                out |= 1 << q;
            } else {
                out &= !(1 << q);
            }
            f *= g;
        }
        Some((out, f))
    }

    fn key(&self) -> Vec<(usize, PauliLabel)> {
        self.ops.clone()
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Repr {
    Terms(Vec<PauliTerm>),
    Dense(CMatrix),
}

/// Hermitian operator on `n_spins` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianOperator {
    n_spins: usize,
    repr: Repr,
    label: String,
}

impl HamiltonianOperator {
    /// Operator from Pauli terms. Fails if a term reaches outside the register
    /// or if the term list is not closed under Hermitian conjugation.
    pub fn from_terms(
        n_spins: usize,
        terms: Vec<PauliTerm>,
        label: impl Into<String>,
    ) -> Result<Self> {
        check_size(n_spins, usize::BITS as usize - 1)?;
        for t in &terms {
            if let Some(q) = t.support().find(|&q| q >= n_spins) {
                return Err(SpinError::IndexOutOfRange {
                    index: q,
                    n: n_spins,
                });
            }
        }
        let op = Self {
            n_spins,
            repr: Repr::Terms(terms),
            label: label.into(),
        };
        if !op.terms_hermitian(1e-12) {
            return Err(SpinError::InvalidParameter(format!(
                "term list of {:?} is not Hermitian",
                op.label
            )));
        }
        Ok(op)
    }

    /// Dense-backed operator. The matrix must be Hermitian to 1e−12.
    pub fn from_dense(n_spins: usize, matrix: CMatrix, label: impl Into<String>) -> Result<Self> {
        let dim = 1usize << n_spins;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(SpinError::DimensionMismatch {
                expected: dim,
                got: matrix.nrows(),
            });
        }
        if hermiticity_residual(&matrix) > 1e-12 * (1.0 + matrix.norm()) {
            return Err(SpinError::InvalidParameter(
                "dense operator is not Hermitian".into(),
            ));
        }
        Ok(Self {
            n_spins,
            repr: Repr::Dense(matrix),
            label: label.into(),
        })
    }

    pub fn zero(n_spins: usize) -> Self {
        Self {
            n_spins,
            repr: Repr::Terms(Vec::new()),
            label: "zero".into(),
        }
    }

    pub fn n_spins(&self) -> usize {
        self.n_spins
    }

    pub fn dim(&self) -> usize {
        1 << self.n_spins
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Term list, or `None` for a dense-backed operator.
    pub fn terms(&self) -> Option<&[PauliTerm]> {
        match &self.repr {
            Repr::Terms(t) => Some(t),
            Repr::Dense(_) => None,
        }
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.repr, Repr::Dense(_))
    }

    /// Qubits the operator acts on nontrivially. A dense-backed operator is
    /// taken to act on every qubit.
    pub fn support(&self) -> Vec<usize> {
        match &self.repr {
            Repr::Terms(terms) => {
                let mut s: Vec<usize> = terms.iter().flat_map(|t| t.support()).collect();
                s.sort_unstable();
                s.dedup();
                s
            }
            Repr::Dense(_) => (0..self.n_spins).collect(),
        }
    }

    /// Same operator on a larger register; new qubits are appended on top.
    pub fn embed(&self, n_total: usize) -> Result<Self> {
        if n_total < self.n_spins {
            return Err(SpinError::TooFewSpins {
                needed: self.n_spins,
                got: n_total,
            });
        }
        match &self.repr {
            Repr::Terms(t) => Ok(Self {
                n_spins: n_total,
                repr: Repr::Terms(t.clone()),
                label: self.label.clone(),
            }),
            Repr::Dense(m) => {
                let extra = 1usize << (n_total - self.n_spins);
                let d = m.nrows();
                let mut big = CMatrix::zeros(d * extra, d * extra);
                for blk in 0..extra {
                    big.view_mut((blk * d, blk * d), (d, d)).copy_from(m);
                }
                Self::from_dense(n_total, big, self.label.clone())
            }
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let repr = match &self.repr {
            Repr::Terms(t) => Repr::Terms(
                t.iter()
                    .map(|term| PauliTerm {
                        coeff: term.coeff * factor,
                        ops: term.ops.clone(),
                    })
                    .collect(),
            ),
            Repr::Dense(m) => Repr::Dense(m * C64::new(factor, 0.0)),
        };
        Self {
            n_spins: self.n_spins,
            repr,
            label: format!("{}*{}", factor, self.label),
        }
    }

    /// Sum of two operators on the same register. Two term lists stay
    /// term-backed; anything involving a dense operator becomes dense.
    pub fn add(&self, other: &Self, dense_cap: usize) -> Result<Self> {
        if self.n_spins != other.n_spins {
            return Err(SpinError::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        let label = format!("{}+{}", self.label, other.label);
        match (&self.repr, &other.repr) {
            (Repr::Terms(a), Repr::Terms(b)) => Ok(Self {
                n_spins: self.n_spins,
                repr: Repr::Terms(a.iter().chain(b).cloned().collect()),
                label,
            }),
            _ => {
                let m = self.to_dense(dense_cap)? + other.to_dense(dense_cap)?;
                Self::from_dense(self.n_spins, m, label)
            }
        }
    }

    /// `out = H·input`, matrix-free for term-backed operators.
    pub fn apply_into(&self, input: &[C64], out: &mut [C64]) -> Result<()> {
        let dim = self.dim();
        if input.len() != dim || out.len() != dim {
            return Err(SpinError::DimensionMismatch {
                expected: dim,
                got: if input.len() != dim {
                    input.len()
                } else {
                    out.len()
                },
            });
        }
        out.iter_mut().for_each(|o| *o = ZERO);
        match &self.repr {
            Repr::Terms(terms) => {
                for term in terms {
                    for (b, &amp) in input.iter().enumerate() {
                        if amp == ZERO {
                            continue;
                        }
                        if let Some((nb, f)) = term.act(b) {
                            out[nb] += f * amp;
                        }
                    }
                }
            }
            Repr::Dense(m) => {
                for (r, o) in out.iter_mut().enumerate() {
                    *o = m.row(r).iter().zip(input).map(|(a, b)| a * b).sum();
                }
            }
        }
        Ok(())
    }

    pub fn apply(&self, input: &[C64]) -> Result<Vec<C64>> {
        let mut out = vec![ZERO; input.len()];
        self.apply_into(input, &mut out)?;
        Ok(out)
    }

    /// ⟨ψ|H|ψ⟩ for an amplitude vector.
    pub fn expectation(&self, psi: &[C64]) -> Result<C64> {
        let h = self.apply(psi)?;
        Ok(psi.iter().zip(&h).map(|(a, b)| a.conj() * b).sum())
    }

    /// Dense matrix of the operator.
    pub fn to_dense(&self, dense_cap: usize) -> Result<CMatrix> {
        let dim = self.dim();
        if dim > dense_cap {
            return Err(SpinError::DenseCapExceeded {
                dim,
                cap: dense_cap,
            });
        }
        match &self.repr {
            Repr::Terms(terms) => {
                let mut m = CMatrix::zeros(dim, dim);
                for term in terms {
                    for col in 0..dim {
                        if let Some((row, f)) = term.act(col) {
                            m[(row, col)] += f;
                        }
                    }
                }
                Ok(m)
            }
            Repr::Dense(m) => Ok(m.clone()),
        }
    }

    /// True when every term's conjugate appears with matching total weight.
    pub fn terms_hermitian(&self, tol: f64) -> bool {
        let Repr::Terms(terms) = &self.repr else {
            return true;
        };
        let mut weights: BTreeMap<Vec<(usize, PauliLabel)>, C64> = BTreeMap::new();
        for t in terms {
            *weights.entry(t.key()).or_insert(ZERO) += t.coeff;
        }
        weights.iter().all(|(key, &w)| {
            let adj = PauliTerm {
                coeff: w,
                ops: key.clone(),
            }
            .adjoint();
            let partner = weights.get(&adj.key()).copied().unwrap_or(ZERO);
            (partner - adj.coeff).norm() <= tol
        })
    }

    /// Conjugation `R H R†` by the collective rotation
    /// `R = ⊗_k exp(−i(angle/2)σ_axis)`, returned dense-backed.
    pub fn rotate_collective(
        &self,
        axis: crate::Axis,
        angle: f64,
        dense_cap: usize,
    ) -> Result<Self> {
        let h = self.to_dense(dense_cap)?;
        let r1 = axis.rotation_matrix(angle);
        let single = CMatrix::from_fn(2, 2, |i, j| r1[i][j]);
        let mut r = CMatrix::from_element(1, 1, ONE);
        for _ in 0..self.n_spins {
            r = single.kronecker(&r);
        }
        let rotated = &r * h * r.adjoint();
        let sym = (&rotated + rotated.adjoint()) * C64::new(0.5, 0.0);
        Self::from_dense(
            self.n_spins,
            sym,
            format!("R_{:?}({angle})[{}]", axis, self.label),
        )
    }

    /// `R H R†` with `R = exp(−i(π/4)Σσy)`, the collective π/2 rotation about y.
    pub fn rotate_y90(&self, dense_cap: usize) -> Result<Self> {
        self.rotate_collective(crate::Axis::Y, std::f64::consts::FRAC_PI_2, dense_cap)
    }
}

pub fn hermiticity_residual(m: &CMatrix) -> f64 {
    (m - m.adjoint()).norm()
}

/// Chain geometry behind a coupling matrix.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Geometry {
    /// `b_ij = b0 / |i−j|^decay_exponent`; an infinite exponent keeps only
    /// nearest neighbours.
    LinearChain {
        b0: f64,
        decay_exponent: f64,
    },
    Custom,
}

/// Symmetric coupling constants `b_ij` with zero diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct CouplingModel {
    n_spins: usize,
    b: Vec<f64>,
    geometry: Geometry,
}

impl CouplingModel {
    pub fn linear_chain(n_spins: usize, b0: f64, decay_exponent: f64) -> Result<Self> {
        if !b0.is_finite() {
            return Err(SpinError::InvalidParameter(format!(
                "b0 must be finite, got {b0}"
            )));
        }
        if decay_exponent.is_nan() || decay_exponent < 0.0 {
            return Err(SpinError::InvalidParameter(format!(
                "decay exponent must be non-negative, got {decay_exponent}"
            )));
        }
        let b = (0..n_spins * n_spins)
            .map(|k| {
                let (i, j) = (k / n_spins, k % n_spins);
                if i == j {
                    0.0
                } else {
                    b0 / (i.abs_diff(j) as f64).powf(decay_exponent)
                }
            })
            .collect();
        Ok(Self {
            n_spins,
            b,
            geometry: Geometry::LinearChain { b0, decay_exponent },
        })
    }

    /// Dipolar chain `b_ij = b0/|i−j|³`.
    pub fn dipolar_chain(n_spins: usize, b0: f64) -> Result<Self> {
        Self::linear_chain(n_spins, b0, 3.0)
    }

    pub fn nearest_neighbor(n_spins: usize, b0: f64) -> Result<Self> {
        Self::linear_chain(n_spins, b0, f64::INFINITY)
    }

    /// Arbitrary couplings from a row-major `n×n` matrix.
    pub fn from_matrix(n_spins: usize, b: Vec<f64>) -> Result<Self> {
        if b.len() != n_spins * n_spins {
            return Err(SpinError::DimensionMismatch {
                expected: n_spins * n_spins,
                got: b.len(),
            });
        }
        for i in 0..n_spins {
            if b[i * n_spins + i] != 0.0 {
                return Err(SpinError::InvalidParameter(format!(
                    "b[{i}][{i}] must be zero"
                )));
            }
            for j in 0..i {
                if b[i * n_spins + j] != b[j * n_spins + i] {
                    return Err(SpinError::InvalidParameter(format!(
                        "couplings must be symmetric: b[{i}][{j}] != b[{j}][{i}]"
                    )));
                }
            }
        }
        Ok(Self {
            n_spins,
            b,
            geometry: Geometry::Custom,
        })
    }

    /// The same geometry on a chain of `n_spins`.
    pub fn resized(&self, n_spins: usize) -> Result<Self> {
        match self.geometry {
            Geometry::LinearChain { b0, decay_exponent } => {
                Self::linear_chain(n_spins, b0, decay_exponent)
            }
            Geometry::Custom if n_spins == self.n_spins => Ok(self.clone()),
            Geometry::Custom => Err(SpinError::InvalidParameter(
                "custom couplings cannot be resized".into(),
            )),
        }
    }

    pub fn n_spins(&self) -> usize {
        self.n_spins
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn b(&self, i: usize, j: usize) -> f64 {
        self.b[i * self.n_spins + j]
    }

    /// Unordered pairs `i<j` with nonzero coupling.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n_spins)
            .flat_map(move |i| (i + 1..self.n_spins).map(move |j| (i, j, self.b(i, j))))
            .filter(|&(_, _, b)| b != 0.0)
    }

    fn require_pairs(&self) -> Result<()> {
        if self.n_spins < 2 {
            return Err(SpinError::TooFewSpins {
                needed: 2,
                got: self.n_spins,
            });
        }
        Ok(())
    }
}

fn term(coeff: f64, ops: &[(usize, PauliLabel)]) -> PauliTerm {
    PauliTerm::new(C64::new(coeff, 0.0), ops).expect("builder terms have distinct qubits")
}

fn double_quantum_pair(i: usize, j: usize, b: f64) -> [PauliTerm; 2] {
    use PauliLabel::{Minus, Plus};
    [
        term(b, &[(i, Plus), (j, Plus)]),
        term(b, &[(i, Minus), (j, Minus)]),
    ]
}

/// Secular dipolar Hamiltonian `Σ_{i<j} b_ij [σz σz − ½(σx σx + σy σy)]`.
pub fn dipolar(c: &CouplingModel) -> Result<HamiltonianOperator> {
    use PauliLabel::{X, Y, Z};
    c.require_pairs()?;
    let terms = c
        .pairs()
        .flat_map(|(i, j, b)| {
            [
                term(b, &[(i, Z), (j, Z)]),
                term(-0.5 * b, &[(i, X), (j, X)]),
                term(-0.5 * b, &[(i, Y), (j, Y)]),
            ]
        })
        .collect();
    HamiltonianOperator::from_terms(c.n_spins, terms, "H_dip")
}

/// Double-quantum grade-raising Hamiltonian `Σ_{i<j} b_ij (σ⁺σ⁺ + σ⁻σ⁻)`.
pub fn gr2(c: &CouplingModel) -> Result<HamiltonianOperator> {
    c.require_pairs()?;
    let terms = c
        .pairs()
        .flat_map(|(i, j, b)| double_quantum_pair(i, j, b))
        .collect();
    HamiltonianOperator::from_terms(c.n_spins, terms, "H_GR2")
}

/// Grade-raising terms of `gr2` restricted to pairs containing `first`.
pub fn gr1(c: &CouplingModel, first: usize) -> Result<HamiltonianOperator> {
    c.require_pairs()?;
    if first >= c.n_spins {
        return Err(SpinError::IndexOutOfRange {
            index: first,
            n: c.n_spins,
        });
    }
    let terms = c
        .pairs()
        .filter(|&(i, j, _)| i == first || j == first)
        .flat_map(|(i, j, b)| double_quantum_pair(i, j, b))
        .collect();
    HamiltonianOperator::from_terms(c.n_spins, terms, "H_GR1")
}

/// Pure n-body grade-raising Hamiltonian `coeff(∏σ⁺ + ∏σ⁻)`, which couples
/// only `|0…0⟩` and `|1…1⟩`.
pub fn grn(n: usize, coeff: f64) -> Result<HamiltonianOperator> {
    check_size(n, usize::BITS as usize - 1)?;
    let raise: Vec<_> = (0..n).map(|q| (q, PauliLabel::Plus)).collect();
    let lower: Vec<_> = (0..n).map(|q| (q, PauliLabel::Minus)).collect();
    HamiltonianOperator::from_terms(
        n,
        vec![term(coeff, &raise), term(coeff, &lower)],
        format!("H_GR^({n})"),
    )
}

/// Collective operator `Σ_k σ_label^k` on the listed qubits.
pub fn collective(n: usize, label: PauliLabel, qubits: &[usize]) -> Result<HamiltonianOperator> {
    let terms = qubits.iter().map(|&q| term(1.0, &[(q, label)])).collect();
    HamiltonianOperator::from_terms(n, terms, format!("sum_{label:?}"))
}
