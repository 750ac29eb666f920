//! Built-in identity suite.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

use spinamp::hamiltonians::{dipolar, gr1, gr2, grn, DEFAULT_DENSE_CAP};
use spinamp::{
    effective_propagator, expm_apply, meyer_wallach, run_scheme, scheme_circuit,
    target_flip_propagator, unitary_equal_on_inputs, unitary_equal_up_to_phase, CouplingModel,
    ExpParams, Mode, ProtocolSpec, QubitRegister, Scheme, TargetState, C64,
};

use crate::error::CliError;

/// Grade-raising prefactor of the rotated dipolar Hamiltonian with σ⁺ = |0⟩⟨1|.
pub const ROTATED_PREFACTOR: f64 = 1.5;
/// Same prefactor with σ± = σx ± iσy; wrong in this crate's convention.
pub const PAULI_SUM_PREFACTOR: f64 = 3.0 / 8.0;

struct Check {
    name: String,
    residual: f64,
    tol: f64,
}

impl Check {
    fn pass(&self) -> bool {
        self.residual < self.tol
    }
}

/// Irregular but deterministic symmetric couplings.
fn test_couplings(n: usize) -> CouplingModel {
    let b = (0..n * n)
        .map(|k| {
            let (i, j) = (k / n, k % n);
            if i == j {
                0.0
            } else {
                ((i + j) as f64 * 1.3 + (i * j) as f64 * 0.7 + n as f64).sin() + 0.2
            }
        })
        .collect();
    CouplingModel::from_matrix(n, b).expect("valid couplings")
}

fn max_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn rotated_dipolar(prefactor: f64) -> Result<Vec<Check>, CliError> {
    let cap = DEFAULT_DENSE_CAP;
    let e = |err| CliError::core("rotated dipolar identity", err);
    (2..=5)
        .map(|n| {
            let c = test_couplings(n);
            let dip = dipolar(&c).map_err(e)?;
            let lhs = dip.rotate_y90(cap).map_err(e)?.to_dense(cap).map_err(e)?;
            let rhs = gr2(&c).map_err(e)?.to_dense(cap).map_err(e)? * C64::new(prefactor, 0.0)
                - dip.to_dense(cap).map_err(e)? * C64::new(0.5, 0.0);
            Ok(Check {
                name: format!("rotated dipolar identity n={n}"),
                residual: (lhs - rhs).norm(),
                tol: 1e-10,
            })
        })
        .collect()
}

fn scheme_equivalence() -> Result<Vec<Check>, CliError> {
    let exp = ExpParams::default();
    let e = |err| CliError::core("scheme equivalence", err);
    let mut out = Vec::new();
    for n in 1..=4 {
        let ideal = target_flip_propagator(n).map_err(e)?;
        let inputs: Vec<QubitRegister> = [0usize, 1]
            .iter()
            .map(|&s| QubitRegister::basis_index(n + 1, s << n))
            .collect::<Result<_, _>>()
            .map_err(e)?;
        let mut props = Vec::new();
        for scheme in [Scheme::CnotChain, Scheme::CatGate] {
            let c = scheme_circuit(&ProtocolSpec::new(scheme, n, TargetState::One, Mode::Full))
                .map_err(e)?;
            let u = effective_propagator(&c, &exp).map_err(e)?;
            out.push(Check {
                name: format!("{} propagator = E+ prod X + E- (n={n})", scheme.name()),
                residual: unitary_equal_up_to_phase(&u, &ideal, 1e-9).residual,
                tol: 1e-9,
            });
            props.push(u);
        }
        out.push(Check {
            name: format!("cnot-chain vs cat-gate on |s>|0..0> (n={n})"),
            residual: unitary_equal_on_inputs(&props[0], &props[1], &inputs, 1e-9)
                .map_err(e)?
                .residual,
            tol: 1e-9,
        });
    }
    Ok(out)
}

fn oracle_checks() -> Result<Vec<Check>, CliError> {
    let cap = DEFAULT_DENSE_CAP;
    let e = |err| CliError::core("oracle cross-check", err);
    let mut out = Vec::new();

    let n = 6;
    let c = test_couplings(n);
    let h = dipolar(&c)
        .map_err(e)?
        .add(&gr1(&c, 0).map_err(e)?, cap)
        .map_err(e)?;
    let amps: Vec<C64> = (0..1usize << n)
        .map(|k| C64::new((k as f64 * 0.37).cos(), (k as f64 * 0.11).sin()))
        .collect();
    let psi = QubitRegister::from_amplitudes(amps).map_err(e)?;
    let m = h.to_dense(cap).map_err(e)?;
    let dense: Vec<C64> = (0..m.nrows())
        .map(|r| {
            (0..m.ncols())
                .map(|k| m[(r, k)] * psi.amplitudes()[k])
                .sum()
        })
        .collect();
    let free = h.apply(psi.amplitudes()).map_err(e)?;
    out.push(Check {
        name: format!("matrix-free apply vs dense (n={n})"),
        residual: max_diff(&free, &dense),
        tol: 1e-12,
    });
    let a = expm_apply(&h, 1.3, &psi, &ExpParams::dense()).map_err(e)?;
    let b = expm_apply(&h, 1.3, &psi, &ExpParams::krylov()).map_err(e)?;
    out.push(Check {
        name: format!("Krylov vs dense exponential (n={n})"),
        residual: max_diff(a.amplitudes(), b.amplitudes()),
        tol: 1e-9,
    });

    let mut cat_err: f64 = 0.0;
    for n in 2..=8 {
        let s = expm_apply(
            &grn(n, 1.0).map_err(e)?,
            FRAC_PI_4,
            &QubitRegister::zeros(n).map_err(e)?,
            &ExpParams::default(),
        )
        .map_err(e)?;
        let mut target = vec![C64::new(0.0, 0.0); 1 << n];
        target[0] = C64::new(FRAC_1_SQRT_2, 0.0);
        target[(1 << n) - 1] = C64::new(0.0, -FRAC_1_SQRT_2);
        cat_err = cat_err
            .max(max_diff(s.amplitudes(), &target))
            .max((meyer_wallach(&s) - 1.0).abs());
    }
    out.push(Check {
        name: "n-quantum propagator builds the cat state (n=2..8)".into(),
        residual: cat_err,
        tol: 1e-10,
    });

    let mut mode_err: f64 = 0.0;
    for n in 1..=6 {
        for scheme in [Scheme::CnotChain, Scheme::CatGate, Scheme::CatNq] {
            for target in [TargetState::Zero, TargetState::One] {
                let f = run_scheme(
                    &ProtocolSpec::new(scheme, n, target, Mode::Full),
                    &ExpParams::default(),
                )
                .map_err(e)?;
                let r = run_scheme(
                    &ProtocolSpec::new(scheme, n, target, Mode::Reduced),
                    &ExpParams::default(),
                )
                .map_err(e)?;
                mode_err = mode_err
                    .max((f.mz - r.mz).abs())
                    .max((meyer_wallach(&f.amplifier) - meyer_wallach(&r.amplifier)).abs());
            }
        }
    }
    out.push(Check {
        name: "full vs reduced mode observables (n=1..6)".into(),
        residual: mode_err,
        tol: 1e-10,
    });
    Ok(out)
}

pub fn cmd_verify(negative_control: bool) -> Result<(), CliError> {
    let prefactor = if negative_control {
        PAULI_SUM_PREFACTOR
    } else {
        ROTATED_PREFACTOR
    };
    println!(
        "rotated dipolar identity: R_y(pi/2) H_dip R_y(pi/2)^dag = c sum b_ij (s+s+ + s-s-) - H_dip/2 \
         with s+ = |0><1|, pairs i<j once; c = {ROTATED_PREFACTOR} (equivalently 3/8 with s+- = X +- iY)"
    );
    if negative_control {
        println!("negative control: testing c = {prefactor}, which must fail");
    }
    let mut checks = rotated_dipolar(prefactor)?;
    checks.extend(scheme_equivalence()?);
    checks.extend(oracle_checks()?);
    let mut failed = 0;
    for c in &checks {
        println!(
            "{} {}: residual {:.3e} (tol {:.0e})",
            if c.pass() { "PASS" } else { "FAIL" },
            c.name,
            c.residual,
            c.tol
        );
        failed += usize::from(!c.pass());
    }
    if failed > 0 {
        return Err(CliError::Verification(format!(
            "{failed} of {} checks failed",
            checks.len()
        )));
    }
    println!("all {} checks passed", checks.len());
    Ok(())
}
