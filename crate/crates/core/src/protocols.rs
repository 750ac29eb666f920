//! The amplification schemes as runnable experiments.
//!
//! Every scheme can run in two modes. In full mode the target spin is an
//! explicit qubit placed above the amplifier (index `n_amplifier`) and the
//! conditional steps are controlled operations. In reduced mode the target
//! has already collapsed, so it is a classical bit that decides whether the
//! conditional steps fire at all.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, SQRT_2};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SpinError};
use crate::hamiltonians::{dipolar, gr1, grn, CouplingModel};
use crate::metrics::{branch_fidelity, contrast, magnetization, meyer_wallach};
use crate::propagate::{
    Axis, Circuit, ControlledEvolution, Evolution, ExpParams, Step, UnitaryPropagator,
};
use crate::statevec::{QubitRegister, DEFAULT_MAX_QUBITS};
use crate::{CMatrix, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Target-controlled CNOT onto every amplifier spin.
    CnotChain,
    /// Gate-built cat state, conditional flip of the first spin, un-mapping.
    CatGate,
    /// Same as `CatGate` with the n-quantum propagator `exp(−iπ/4·H_GR^(n))`.
    CatNq,
    /// Repeated dipolar evolution with a target-conditioned grade-raising kick.
    RandomMap,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [
        Scheme::CnotChain,
        Scheme::CatGate,
        Scheme::CatNq,
        Scheme::RandomMap,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::CnotChain => "cnot-chain",
            Scheme::CatGate => "cat-gate",
            Scheme::CatNq => "cat-nq",
            Scheme::RandomMap => "random-map",
        }
    }
}

impl std::str::FromStr for Scheme {
    type Err = SpinError;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| SpinError::InvalidParameter(format!("unknown scheme {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TargetState {
    Zero,
    One,
}

impl TargetState {
    pub fn bit(self) -> bool {
        self == TargetState::One
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Full,
    Reduced,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProtocolSpec {
    pub scheme: Scheme,
    pub n_amplifier: usize,
    pub target: TargetState,
    pub mode: Mode,
    /// Amplifier spin that interacts with the target. Qubit 0 is the chain end.
    pub first_spin: usize,
}

impl ProtocolSpec {
    pub fn new(scheme: Scheme, n_amplifier: usize, target: TargetState, mode: Mode) -> Self {
        Self {
            scheme,
            n_amplifier,
            target,
            mode,
            first_spin: 0,
        }
    }

    pub fn with_target(self, target: TargetState) -> Self {
        Self { target, ..self }
    }

    pub fn with_mode(self, mode: Mode) -> Self {
        Self { mode, ..self }
    }

    /// Qubits in the simulated register.
    pub fn n_total(&self) -> usize {
        match self.mode {
            Mode::Full => self.n_amplifier + 1,
            Mode::Reduced => self.n_amplifier,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_amplifier == 0 || self.n_total() > DEFAULT_MAX_QUBITS {
            return Err(SpinError::RegisterSize {
                n: self.n_total(),
                max: DEFAULT_MAX_QUBITS,
            });
        }
        if self.first_spin >= self.n_amplifier {
            return Err(SpinError::IndexOutOfRange {
                index: self.first_spin,
                n: self.n_amplifier,
            });
        }
        if self.scheme == Scheme::RandomMap && self.n_amplifier < 2 {
            return Err(SpinError::TooFewSpins {
                needed: 2,
                got: self.n_amplifier,
            });
        }
        Ok(())
    }

    fn expect_scheme(&self, scheme: Scheme) -> Result<()> {
        if self.scheme != scheme {
            return Err(SpinError::InvalidParameter(format!(
                "expected scheme {}, got {}",
                scheme.name(),
                self.scheme.name()
            )));
        }
        self.validate()
    }

    fn initial_state(&self) -> Result<QubitRegister> {
        let amp = QubitRegister::zeros(self.n_amplifier)?;
        match self.mode {
            Mode::Reduced => Ok(amp),
            Mode::Full => {
                let bit = if self.target.bit() { "1" } else { "0" };
                amp.tensor_high(&QubitRegister::basis_state(1, bit)?)
            }
        }
    }

    fn amplifier_factor(&self, state: &QubitRegister) -> Result<QubitRegister> {
        match self.mode {
            Mode::Reduced => Ok(state.clone()),
            Mode::Full => state.condition_on(self.n_amplifier, self.target.bit()),
        }
    }
}

/// Final state of a single-branch scheme run.
#[derive(Clone, Debug, PartialEq)]
pub struct SchemeOutcome {
    /// Amplifier state (target factored out in full mode).
    pub amplifier: QubitRegister,
    /// Whole register in full mode.
    pub full: Option<QubitRegister>,
    /// Amplifier magnetization in spin quanta.
    pub mz: f64,
}

/// Gate-built cat-state map on `n_amplifier` spins: π/2 x-rotation on
/// `first`, then a CNOT from `first` onto every other amplifier spin.
pub fn cat_map_circuit(n_total: usize, n_amplifier: usize, first: usize) -> Circuit {
    let mut c = Circuit::new(n_total);
    c.push(Step::Rotation {
        axis: Axis::X,
        angle: FRAC_PI_2,
        qubits: vec![first],
    });
    for q in (0..n_amplifier).filter(|&q| q != first) {
        c.push(Step::Cnot {
            control: first,
            target: q,
        });
    }
    c
}

/// Conditional step of the cat schemes: controlled X from the target in
/// full mode, a plain X (or nothing) in reduced mode.
fn conditional_flip(
    c: &mut Circuit,
    mode: Mode,
    n_amplifier: usize,
    target: TargetState,
    first: usize,
) {
    match mode {
        Mode::Full => {
            c.push(Step::Cnot {
                control: n_amplifier,
                target: first,
            });
        }
        Mode::Reduced if target.bit() => {
            c.push(Step::Rotation {
                axis: Axis::X,
                angle: PI,
                qubits: vec![first],
            });
        }
        Mode::Reduced => {}
    }
}

/// Ideal effective propagator `E⁺_T ⊗ ∏σx + E⁻_T ⊗ I` on `n_amplifier + 1`
/// qubits, target on the top qubit and `E⁺ = |1⟩⟨1|`.
pub fn target_flip_propagator(n_amplifier: usize) -> Result<UnitaryPropagator> {
    crate::statevec::check_size(n_amplifier + 1, DEFAULT_MAX_QUBITS)?;
    let dim = 1usize << (n_amplifier + 1);
    let flip = (1usize << n_amplifier) - 1;
    let mut matrix = CMatrix::zeros(dim, dim);
    for col in 0..dim {
        let row = if (col >> n_amplifier) & 1 == 1 {
            col ^ flip
        } else {
            col
        };
        matrix[(row, col)] = C64::new(1.0, 0.0);
    }
    Ok(UnitaryPropagator {
        n_qubits: n_amplifier + 1,
        matrix,
    })
}

/// Circuit implementing a non-iterated scheme.
///
/// In reduced mode the conditional flip is the rotation `R_x(π) = −iX`,
/// which differs from `X` by a global phase only.
pub fn scheme_circuit(spec: &ProtocolSpec) -> Result<Circuit> {
    spec.validate()?;
    let n = spec.n_amplifier;
    let nt = spec.n_total();
    let first = spec.first_spin;
    match spec.scheme {
        Scheme::CnotChain => {
            let mut c = Circuit::new(nt);
            match spec.mode {
                Mode::Full => {
                    for q in 0..n {
                        c.push(Step::Cnot {
                            control: n,
                            target: q,
                        });
                    }
                }
                Mode::Reduced if spec.target.bit() => {
                    c.push(Step::Rotation {
                        axis: Axis::X,
                        angle: PI,
                        qubits: (0..n).collect(),
                    });
                }
                Mode::Reduced => {}
            }
            Ok(c)
        }
        Scheme::CatGate => {
            let map = cat_map_circuit(nt, n, first);
            let mut c = map.clone();
            conditional_flip(&mut c, spec.mode, n, spec.target, first);
            c.extend(&map.inverse());
            Ok(c)
        }
        Scheme::CatNq => {
            let h = grn(n, 1.0)?.embed(nt)?;
            let mut c = Circuit::new(nt);
            c.push(Step::Evolve {
                h: h.clone(),
                t: FRAC_PI_4,
            });
            conditional_flip(&mut c, spec.mode, n, spec.target, first);
            c.push(Step::Evolve { h, t: -FRAC_PI_4 });
            Ok(c)
        }
        Scheme::RandomMap => Err(SpinError::InvalidParameter(
            "the random map is iterated; use run_random_map".into(),
        )),
    }
}

fn run_circuit_scheme(spec: &ProtocolSpec, exp: &ExpParams) -> Result<SchemeOutcome> {
    let circuit = scheme_circuit(spec)?;
    let mut state = spec.initial_state()?;
    circuit.apply(&mut state, exp)?;
    let amplifier = spec.amplifier_factor(&state)?;
    let all: Vec<usize> = (0..spec.n_amplifier).collect();
    let mz = magnetization(&amplifier, &all)?;
    Ok(SchemeOutcome {
        amplifier,
        full: (spec.mode == Mode::Full).then_some(state),
        mz,
    })
}

pub fn run_scheme_cnot_chain(spec: &ProtocolSpec) -> Result<SchemeOutcome> {
    spec.expect_scheme(Scheme::CnotChain)?;
    run_circuit_scheme(spec, &ExpParams::default())
}

pub fn run_scheme_cat_gate(spec: &ProtocolSpec) -> Result<SchemeOutcome> {
    spec.expect_scheme(Scheme::CatGate)?;
    run_circuit_scheme(spec, &ExpParams::default())
}

pub fn run_scheme_cat_nq(spec: &ProtocolSpec, exp: &ExpParams) -> Result<SchemeOutcome> {
    spec.expect_scheme(Scheme::CatNq)?;
    run_circuit_scheme(spec, exp)
}

/// Runs any non-iterated scheme.
pub fn run_scheme(spec: &ProtocolSpec, exp: &ExpParams) -> Result<SchemeOutcome> {
    match spec.scheme {
        Scheme::CnotChain => run_scheme_cnot_chain(spec),
        Scheme::CatGate => run_scheme_cat_gate(spec),
        Scheme::CatNq => run_scheme_cat_nq(spec, exp),
        Scheme::RandomMap => Err(SpinError::InvalidParameter(
            "the random map is iterated; use run_random_map".into(),
        )),
    }
}

/// Both branches of a non-iterated scheme and the resulting contrast.
#[derive(Clone, Debug, PartialEq)]
pub struct ContrastReport {
    pub n_amplifier: usize,
    pub mz0: f64,
    pub mz1: f64,
    pub mz_init: f64,
    pub contrast: f64,
    pub q0: f64,
    pub q1: f64,
    pub fidelity: f64,
}

pub fn scheme_contrast(spec: &ProtocolSpec, exp: &ExpParams) -> Result<ContrastReport> {
    let zero = run_scheme(&spec.with_target(TargetState::Zero), exp)?;
    let one = run_scheme(&spec.with_target(TargetState::One), exp)?;
    let mz_init = spec.n_amplifier as f64;
    Ok(ContrastReport {
        n_amplifier: spec.n_amplifier,
        mz0: zero.mz,
        mz1: one.mz,
        mz_init,
        contrast: contrast(zero.mz, one.mz, mz_init)?,
        q0: meyer_wallach(&zero.amplifier),
        q1: meyer_wallach(&one.amplifier),
        fidelity: branch_fidelity(&zero.amplifier, &one.amplifier)?,
    })
}

/// Reading of the map product `e^{−it·H_GR1}e^{−iT·H_dip}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MapOrder {
    /// Rightmost factor first: dipolar evolution, then the conditional kick.
    DipolarFirst,
    KickFirst,
}

/// Normalization of the raising/lowering operators inside the conditional
/// kick `H_GR1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KickConvention {
    /// σ⁺ = |0⟩⟨1|, the convention used everywhere else in the crate.
    Projector,
    /// σ± = σx ± iσy, which makes every two-body grade-raising term four
    /// times larger. In this convention the rotated dipolar Hamiltonian
    /// carries the prefactor 3/8.
    PauliSum,
}

impl KickConvention {
    /// Factor applied to the projector-normalized `H_GR1`.
    pub fn factor(self) -> f64 {
        match self {
            KickConvention::Projector => 1.0,
            KickConvention::PauliSum => 4.0,
        }
    }
}

/// Knobs of the repeated perturbed map.
#[derive(Clone, Debug, PartialEq)]
pub struct MapParams {
    /// Conditional grade-raising time `t·b₁₂`.
    pub t_pert: f64,
    /// Free dipolar evolution time `T·b₁₂`.
    pub t_free: f64,
    pub r_max: usize,
    pub couplings: CouplingModel,
    pub map_order: MapOrder,
    pub kick_convention: KickConvention,
}

impl MapParams {
    pub const DEFAULT_T_PERT: f64 = 0.5;
    pub const DEFAULT_T_FREE: f64 = PI / SQRT_2;

    /// `t·b₁₂ = 1/2`, `T·b₁₂ = π/√2` on a dipolar chain with `b₁₂ = 1`,
    /// kick written with σ± = σx ± iσy.
    pub fn defaults(n_amplifier: usize, r_max: usize) -> Result<Self> {
        Ok(Self {
            t_pert: Self::DEFAULT_T_PERT,
            t_free: Self::DEFAULT_T_FREE,
            r_max,
            couplings: CouplingModel::dipolar_chain(n_amplifier, 1.0)?,
            map_order: MapOrder::DipolarFirst,
            kick_convention: KickConvention::PauliSum,
        })
    }

    pub fn validate(&self, n_amplifier: usize) -> Result<()> {
        if self.r_max == 0 {
            return Err(SpinError::InvalidParameter(
                "r_max must be at least 1".into(),
            ));
        }
        if !self.t_pert.is_finite() || !self.t_free.is_finite() {
            return Err(SpinError::InvalidParameter(
                "map times must be finite".into(),
            ));
        }
        if self.couplings.n_spins() != n_amplifier {
            return Err(SpinError::DimensionMismatch {
                expected: n_amplifier,
                got: self.couplings.n_spins(),
            });
        }
        Ok(())
    }
}

/// Per-repetition record of a random-map run. Index `k` holds repetition
/// `k + 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceResult {
    pub n_amplifier: usize,
    pub threshold: f64,
    pub mz0: Vec<f64>,
    pub mz1: Vec<f64>,
    pub contrast: Vec<f64>,
    pub q0: Vec<f64>,
    pub q1: Vec<f64>,
    pub fidelity: Vec<f64>,
    /// First repetition (1-based) with contrast ≥ threshold.
    pub r_star: Option<usize>,
}

/// Long-run averages over the second half of a trace.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Saturation {
    pub contrast_mean: f64,
    pub contrast_std: f64,
    pub q0_mean: f64,
    pub q1_mean: f64,
    pub fidelity_mean: f64,
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

impl TraceResult {
    pub fn len(&self) -> usize {
        self.contrast.len()
    }

    pub fn is_empty(&self) -> bool {
        self.contrast.is_empty()
    }

    /// Averages over repetitions `r > r_max/2`.
    pub fn saturation(&self) -> Saturation {
        let start = self.len() / 2;
        let c = &self.contrast[start..];
        let cm = mean(c);
        let var = c.iter().map(|x| (x - cm) * (x - cm)).sum::<f64>() / c.len() as f64;
        Saturation {
            contrast_mean: cm,
            contrast_std: var.sqrt(),
            q0_mean: mean(&self.q0[start..]),
            q1_mean: mean(&self.q1[start..]),
            fidelity_mean: mean(&self.fidelity[start..]),
        }
    }

    fn push(&mut self, amp0: &QubitRegister, amp1: &QubitRegister) -> Result<()> {
        let all: Vec<usize> = (0..self.n_amplifier).collect();
        let mz0 = magnetization(amp0, &all)?;
        let mz1 = magnetization(amp1, &all)?;
        let c = contrast(mz0, mz1, self.n_amplifier as f64)?;
        self.mz0.push(mz0);
        self.mz1.push(mz1);
        self.contrast.push(c);
        self.q0.push(meyer_wallach(amp0));
        self.q1.push(meyer_wallach(amp1));
        self.fidelity.push(branch_fidelity(amp0, amp1)?);
        if self.r_star.is_none() && c >= self.threshold {
            self.r_star = Some(self.len());
        }
        Ok(())
    }
}

enum Kick {
    Plain(Evolution),
    Controlled(ControlledEvolution),
}

/// Runs both target branches of the perturbed map for `r_max` repetitions.
/// `spec.target` is ignored; both branches are always simulated.
pub fn run_random_map(
    spec: &ProtocolSpec,
    params: &MapParams,
    threshold: f64,
    exp: &ExpParams,
) -> Result<TraceResult> {
    spec.expect_scheme(Scheme::RandomMap)?;
    params.validate(spec.n_amplifier)?;
    let n = spec.n_amplifier;
    let nt = spec.n_total();
    let h_dip = dipolar(&params.couplings)?.embed(nt)?;
    let h_kick = gr1(&params.couplings, spec.first_spin)?
        .scaled(params.kick_convention.factor())
        .embed(nt)?;
    let free = Evolution::new(&h_dip, params.t_free, exp)?;
    let kick = match spec.mode {
        Mode::Reduced => Kick::Plain(Evolution::new(&h_kick, params.t_pert, exp)?),
        Mode::Full => Kick::Controlled(ControlledEvolution::new(n, &h_kick, params.t_pert, exp)?),
    };

    let spec0 = spec.with_target(TargetState::Zero);
    let spec1 = spec.with_target(TargetState::One);
    let mut s0 = spec0.initial_state()?;
    let mut s1 = spec1.initial_state()?;
    let mut trace = TraceResult {
        n_amplifier: n,
        threshold,
        mz0: Vec::with_capacity(params.r_max),
        mz1: Vec::with_capacity(params.r_max),
        contrast: Vec::with_capacity(params.r_max),
        q0: Vec::with_capacity(params.r_max),
        q1: Vec::with_capacity(params.r_max),
        fidelity: Vec::with_capacity(params.r_max),
        r_star: None,
    };
    let step = |state: &mut QubitRegister, kicked: bool| -> Result<()> {
        let apply_kick = |state: &mut QubitRegister| match &kick {
            Kick::Plain(e) if kicked => e.apply(state),
            Kick::Plain(_) => Ok(()),
            Kick::Controlled(ce) => ce.apply(state),
        };
        match params.map_order {
            MapOrder::DipolarFirst => {
                free.apply(state)?;
                apply_kick(state)
            }
            MapOrder::KickFirst => {
                apply_kick(state)?;
                free.apply(state)
            }
        }
    };
    for _ in 0..params.r_max {
        step(&mut s0, false)?;
        step(&mut s1, true)?;
        trace.push(&spec0.amplifier_factor(&s0)?, &spec1.amplifier_factor(&s1)?)?;
    }
    Ok(trace)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: usize,
    /// Hilbert-space dimension `2^n` of the amplifier.
    pub dim: usize,
    pub r_star: Option<usize>,
    pub contrast_sat: f64,
    pub q_sat: f64,
    pub fidelity_sat: f64,
}

/// Least-squares fit `r_star ≈ slope·log₂N + intercept`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogFit {
    pub slope: f64,
    pub intercept: f64,
    /// Pearson correlation; NaN when every `r_star` is equal.
    pub correlation: f64,
    /// Root-mean-square residual.
    pub residual: f64,
    pub points: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    pub traces: Vec<TraceResult>,
    /// `None` when fewer than two distinct sizes reached the threshold.
    pub fit: Option<LogFit>,
}

/// Fits `y ≈ slope·x + intercept`.
pub fn fit_line(points: &[(f64, f64)]) -> Option<LogFit> {
    let k = points.len();
    if k < 2 {
        return None;
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / k as f64;
    let my = points.iter().map(|p| p.1).sum::<f64>() / k as f64;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let correlation = if syy == 0.0 {
        f64::NAN
    } else {
        sxy / (sxx * syy).sqrt()
    };
    let residual = (points
        .iter()
        .map(|p| (p.1 - slope * p.0 - intercept).powi(2))
        .sum::<f64>()
        / k as f64)
        .sqrt();
    Some(LogFit {
        slope,
        intercept,
        correlation,
        residual,
        points: k,
    })
}

/// Random-map runs over several chain lengths. The coupling geometry of
/// `base` is regenerated for each `n`. Rows run in parallel and come back
/// sorted by `n`.
pub fn run_sweep(
    ns: &[usize],
    base: &MapParams,
    first_spin: usize,
    threshold: f64,
    exp: &ExpParams,
) -> Result<SweepTable> {
    if ns.is_empty() {
        return Err(SpinError::InvalidParameter(
            "sweep needs at least one size".into(),
        ));
    }
    let mut sizes = ns.to_vec();
    sizes.sort_unstable();
    sizes.dedup();
    let results: Vec<Result<TraceResult>> = sizes
        .par_iter()
        .map(|&n| {
            let params = MapParams {
                couplings: base.couplings.resized(n)?,
                ..base.clone()
            };
            let spec = ProtocolSpec {
                first_spin,
                ..ProtocolSpec::new(Scheme::RandomMap, n, TargetState::One, Mode::Reduced)
            };
            run_random_map(&spec, &params, threshold, exp)
        })
        .collect();
    let traces = results.into_iter().collect::<Result<Vec<_>>>()?;
    let rows: Vec<SweepRow> = traces
        .iter()
        .map(|t| {
            let s = t.saturation();
            SweepRow {
                n: t.n_amplifier,
                dim: 1 << t.n_amplifier,
                r_star: t.r_star,
                contrast_sat: s.contrast_mean,
                q_sat: s.q1_mean,
                fidelity_sat: s.fidelity_mean,
            }
        })
        .collect();
    let points: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| r.r_star.map(|rs| ((r.dim as f64).log2(), rs as f64)))
        .collect();
    Ok(SweepTable {
        fit: fit_line(&points),
        rows,
        traces,
    })
}
