//! `exp(−iHt)` by dense Hermitian eigendecomposition or by Lanczos.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Result, SpinError};
use crate::hamiltonians::{HamiltonianOperator, DEFAULT_DENSE_CAP};
use crate::statevec::QubitRegister;
use crate::{CMatrix, C64};

const ZERO: C64 = C64::new(0.0, 0.0);

/// Upper bound on accepted Krylov substeps for one exponential.
const MAX_SUBSTEPS: usize = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExpMethod {
    /// Dense when `2^n ≤ dense_cap`, Krylov otherwise.
    Auto,
    DenseEig,
    Krylov,
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ExpParams {
    pub method: ExpMethod,
    pub tolerance: f64,
    pub dense_cap: usize,
    pub krylov_dim: usize,
}

impl Default for ExpParams {
    fn default() -> Self {
        Self {
            method: ExpMethod::Auto,
            tolerance: 1e-10,
            dense_cap: DEFAULT_DENSE_CAP,
            krylov_dim: 30,
        }
    }
}

impl ExpParams {
    pub fn dense() -> Self {
        Self {
            method: ExpMethod::DenseEig,
            ..Self::default()
        }
    }

    pub fn krylov() -> Self {
        Self {
            method: ExpMethod::Krylov,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(SpinError::InvalidParameter(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if self.krylov_dim < 2 {
            return Err(SpinError::InvalidParameter(format!(
                "krylov_dim must be at least 2, got {}",
                self.krylov_dim
            )));
        }
        Ok(())
    }

    fn use_dense(&self, dim: usize) -> Result<bool> {
        match self.method {
            ExpMethod::Auto => Ok(dim <= self.dense_cap),
            ExpMethod::DenseEig if dim > self.dense_cap => Err(SpinError::DenseCapExceeded {
                dim,
                cap: self.dense_cap,
            }),
            ExpMethod::DenseEig => Ok(true),
            ExpMethod::Krylov => Ok(false),
        }
    }
}

/// A precomputed `exp(−iHt)` that can be applied repeatedly.
#[derive(Clone, Debug)]
pub struct Evolution {
    dim: usize,
    kind: Kind,
}

#[derive(Clone, Debug)]
enum Kind {
    Identity,
    Dense(CMatrix),
    Krylov {
        h: HamiltonianOperator,
        t: f64,
        params: ExpParams,
    },
}

impl Evolution {
    pub fn new(h: &HamiltonianOperator, t: f64, params: &ExpParams) -> Result<Self> {
        params.validate()?;
        if !t.is_finite() {
            return Err(SpinError::InvalidParameter(format!(
                "evolution time must be finite, got {t}"
            )));
        }
        let dim = h.dim();
        let kind = if t == 0.0 || h.terms().is_some_and(|terms| terms.is_empty()) {
            Kind::Identity
        } else if params.use_dense(dim)? {
            Kind::Dense(dense_propagator(&h.to_dense(params.dense_cap.max(dim))?, t))
        } else {
            Kind::Krylov {
                h: h.clone(),
                t,
                params: *params,
            }
        };
        Ok(Self { dim, kind })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The dense propagator matrix, if this evolution was built densely.
    pub fn matrix(&self) -> Option<&CMatrix> {
        match &self.kind {
            Kind::Dense(u) => Some(u),
            _ => None,
        }
    }

    pub fn apply(&self, state: &mut QubitRegister) -> Result<()> {
        if state.dim() != self.dim {
            return Err(SpinError::DimensionMismatch {
                expected: self.dim,
                got: state.dim(),
            });
        }
        let out = self.apply_vec(state.amplitudes())?;
        state.amplitudes_mut().copy_from_slice(&out);
        Ok(())
    }

    /// Applies the propagator to an arbitrary (not necessarily normalized)
    /// vector.
    pub(crate) fn apply_vec(&self, v: &[C64]) -> Result<Vec<C64>> {
        match &self.kind {
            Kind::Identity => Ok(v.to_vec()),
            Kind::Dense(u) => Ok((u * DVector::from_column_slice(v)).data.into()),
            Kind::Krylov { h, t, params } => krylov_expm(h, *t, v, params),
        }
    }
}

/// `exp(−iHt)|ψ⟩`.
pub fn expm_apply(
    h: &HamiltonianOperator,
    t: f64,
    state: &QubitRegister,
    params: &ExpParams,
) -> Result<QubitRegister> {
    if h.n_spins() != state.n_qubits() {
        return Err(SpinError::DimensionMismatch {
            expected: h.dim(),
            got: state.dim(),
        });
    }
    let mut out = state.clone();
    Evolution::new(h, t, params)?.apply(&mut out)?;
    Ok(out)
}

fn is_real(m: &CMatrix) -> bool {
    let scale = m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()));
    m.iter().all(|z| z.im.abs() <= 1e-15 * scale)
}

/// `exp(−iHt)` for a dense Hermitian `H`.
pub fn dense_propagator(h: &CMatrix, t: f64) -> CMatrix {
    let dim = h.nrows();
    if is_real(h) {
        let real = DMatrix::from_fn(dim, dim, |i, j| h[(i, j)].re);
        let eig = SymmetricEigen::new(real);
        let v = &eig.eigenvectors;
        let mut vc = v.clone();
        let mut vs = v.clone();
        for (k, &lam) in eig.eigenvalues.iter().enumerate() {
            let (s, c) = (lam * t).sin_cos();
            vc.column_mut(k).scale_mut(c);
            vs.column_mut(k).scale_mut(-s);
        }
        let re = vc * v.transpose();
        let im = vs * v.transpose();
        CMatrix::from_fn(dim, dim, |i, j| C64::new(re[(i, j)], im[(i, j)]))
    } else {
        let eig = SymmetricEigen::new(h.clone());
        let v = &eig.eigenvectors;
        let mut vp = v.clone();
        for (k, &lam) in eig.eigenvalues.iter().enumerate() {
            let phase = C64::from_polar(1.0, -lam * t);
            for z in vp.column_mut(k).iter_mut() {
                *z *= phase;
            }
        }
        vp * v.adjoint()
    }
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

struct Lanczos {
    basis: Vec<Vec<C64>>,
    alpha: Vec<f64>,
    beta: Vec<f64>,
    /// `β_m`, coupling the last basis vector to the rest of the space.
    residual: f64,
}

fn lanczos(h: &HamiltonianOperator, start: &[C64], start_norm: f64, m: usize) -> Result<Lanczos> {
    let dim = start.len();
    let mut basis: Vec<Vec<C64>> = vec![start.iter().map(|x| x / start_norm).collect()];
    let (mut alpha, mut beta) = (Vec::with_capacity(m), Vec::with_capacity(m));
    let mut w = vec![ZERO; dim];
    let mut residual = 0.0;
    for j in 0..m {
        h.apply_into(&basis[j], &mut w)?;
        let a = dot(&basis[j], &w).re;
        alpha.push(a);
        for (wi, vi) in w.iter_mut().zip(&basis[j]) {
            *wi -= vi * a;
        }
        if j > 0 {
            let b = beta[j - 1];
            for (wi, vi) in w.iter_mut().zip(&basis[j - 1]) {
                *wi -= vi * b;
            }
        }
        // full reorthogonalization
        for v in &basis {
            let c = dot(v, &w);
            for (wi, vi) in w.iter_mut().zip(v) {
                *wi -= vi * c;
            }
        }
        let b = norm(&w);
        residual = b;
        let scale = a.abs() + beta.last().copied().unwrap_or(0.0);
        if b == 0.0 || b <= 1e-13 * scale {
            residual = 0.0;
            break;
        }
        if j + 1 < m {
            beta.push(b);
            basis.push(w.iter().map(|x| x / b).collect());
        }
    }
    Ok(Lanczos {
        basis,
        alpha,
        beta,
        residual,
    })
}

/// `exp(−iτT)e₁` for the real symmetric tridiagonal `T`.
fn tridiagonal_exp_e1(alpha: &[f64], beta: &[f64], tau: f64) -> Vec<C64> {
    let m = alpha.len();
    let t = DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            alpha[i]
        } else if i + 1 == j {
            beta[i]
        } else if j + 1 == i {
            beta[j]
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(t);
    (0..m)
        .map(|i| {
            eig.eigenvalues
                .iter()
                .enumerate()
                .map(|(k, &lam)| {
                    let v = eig.eigenvectors[(i, k)] * eig.eigenvectors[(0, k)];
                    C64::from_polar(v, -lam * tau)
                })
                .sum()
        })
        .collect()
}

/// Lanczos approximation of `exp(−iHt)v` with adaptive substepping. A step
/// is accepted when the a-posteriori estimate `β_m·|[e^{−iτT}e₁]_m|·‖v‖`
/// is below `tolerance·|τ/t|`.
pub(crate) fn krylov_expm(
    h: &HamiltonianOperator,
    t: f64,
    v: &[C64],
    p: &ExpParams,
) -> Result<Vec<C64>> {
    let dim = h.dim();
    if v.len() != dim {
        return Err(SpinError::DimensionMismatch {
            expected: dim,
            got: v.len(),
        });
    }
    let mut w = v.to_vec();
    let total = t.abs();
    let sign = t.signum();
    let mut done = 0.0;
    let mut tau = total;
    let mut substeps = 0usize;
    let m = p.krylov_dim.min(dim);
    while done < total {
        let wnorm = norm(&w);
        if wnorm == 0.0 {
            return Ok(w);
        }
        let lz = lanczos(h, &w, wnorm, m)?;
        tau = tau.min(total - done);
        let (y, accepted_tau) = loop {
            let y = tridiagonal_exp_e1(&lz.alpha, &lz.beta, sign * tau);
            let est = lz.residual * y.last().map_or(0.0, |c| c.norm()) * wnorm;
            let budget = p.tolerance * tau / total;
            if est <= budget {
                break (y, tau);
            }
            tau *= 0.5;
            if tau < total * 1e-12 || substeps >= MAX_SUBSTEPS {
                return Err(SpinError::KrylovNonConvergence {
                    estimate: est,
                    tolerance: budget,
                    substeps,
                });
            }
        };
        let mut next = vec![ZERO; dim];
        for (coef, vb) in y.iter().zip(&lz.basis) {
            let c = coef * wnorm;
            for (n, b) in next.iter_mut().zip(vb) {
                *n += b * c;
            }
        }
        w = next;
        substeps += 1;
        done += accepted_tau;
        if total - done <= total * 1e-15 {
            break;
        }
        tau = accepted_tau * 2.0;
    }
    Ok(w)
}
