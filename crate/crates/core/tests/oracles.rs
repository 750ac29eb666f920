//! Matrix-free kernels, reductions and exponentials against dense brute force.

mod common;

use common::*;
use nalgebra::DMatrix;
use proptest::prelude::*;
use spinamp::hamiltonians::{collective, dipolar, gr1, gr2, grn, DEFAULT_DENSE_CAP};
use spinamp::metrics::meyer_wallach;
use spinamp::propagate::{controlled_evolve, expm_apply, ExpParams};
use spinamp::{CMatrix, CouplingModel, HamiltonianOperator, PauliLabel, QubitRegister, C64};
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

const CAP: usize = DEFAULT_DENSE_CAP;

#[test]
fn apply_local_single_qubit_matches_kronecker() {
    let mut r = rng(1);
    for n in 1..=6 {
        for q in 0..n {
            let op = random_matrix(2, &mut r);
            let psi = random_state(n, &mut r);
            let expected = kron_embed_1q(n, &op, q) * column(&psi);
            let mut out = psi.clone();
            out.apply_local(&op, &[q]).unwrap();
            assert!(
                max_abs_diff(out.amplitudes(), expected.as_slice()) < 1e-12,
                "n={n} q={q}"
            );
        }
    }
}

#[test]
fn apply_local_two_qubit_matches_dense_embedding() {
    let mut r = rng(2);
    for n in 2..=6 {
        for a in 0..n {
            for b in (0..n).filter(|&b| b != a) {
                let op = random_matrix(4, &mut r);
                let psi = random_state(n, &mut r);
                // full matrix element by element: rows/columns must agree off
                // the targets, the local index is bit_a + 2 bit_b
                let dim = 1usize << n;
                let mask = (1usize << a) | (1usize << b);
                let local = |i: usize| ((i >> a) & 1) | (((i >> b) & 1) << 1);
                let full = DMatrix::from_fn(dim, dim, |i, j| {
                    if i & !mask == j & !mask {
                        op[(local(i), local(j))]
                    } else {
                        C64::new(0.0, 0.0)
                    }
                });
                let expected = full * column(&psi);
                let mut out = psi.clone();
                out.apply_local(&op, &[a, b]).unwrap();
                assert!(max_abs_diff(out.amplitudes(), expected.as_slice()) < 1e-12);
            }
        }
    }
}

#[test]
fn cnot_on_superposition_gives_bell_state() {
    let h = FRAC_1_SQRT_2;
    let mut psi = QubitRegister::from_amplitudes(vec![
        C64::new(h, 0.0),
        C64::new(h, 0.0),
        C64::new(0.0, 0.0),
        C64::new(0.0, 0.0),
    ])
    .unwrap();
    let o = C64::new(0.0, 0.0);
    let l = C64::new(1.0, 0.0);
    // control qubit 0 (local bit 0), target qubit 1
    let cnot = DMatrix::from_row_slice(4, 4, &[l, o, o, o, o, o, o, l, o, o, l, o, o, l, o, o]);
    let dense = cnot.clone() * column(&psi);
    psi.apply_local(&cnot, &[0, 1]).unwrap();
    assert!(max_abs_diff(psi.amplitudes(), dense.as_slice()) < 1e-15);
    assert!((psi.amplitudes()[0].re - h).abs() < 1e-15);
    assert!((psi.amplitudes()[3].re - h).abs() < 1e-15);
}

fn dense_partial_trace_single(psi: &QubitRegister, i: usize) -> CMatrix {
    let n = psi.n_qubits();
    let v = column(psi);
    let rho = &v * v.adjoint();
    let dim = 1usize << n;
    let mut red = CMatrix::zeros(2, 2);
    for row in 0..dim {
        for col in 0..dim {
            if row & !(1 << i) == col & !(1 << i) {
                red[((row >> i) & 1, (col >> i) & 1)] += rho[(row, col)];
            }
        }
    }
    red
}

#[test]
fn reduce_single_matches_dense_partial_trace() {
    let mut r = rng(3);
    for n in 1..=6 {
        let psi = random_state(n, &mut r);
        for i in 0..n {
            let red = psi.reduce_single(i).unwrap();
            let oracle = dense_partial_trace_single(&psi, i);
            for a in 0..2 {
                for b in 0..2 {
                    assert!((red.matrix[a][b] - oracle[(a, b)]).norm() < 1e-12);
                }
            }
            assert!(red.hermiticity_residual() < 1e-12);
            assert!((red.trace() - C64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }
}

#[test]
fn meyer_wallach_matches_dense_purities() {
    let mut r = rng(4);
    for n in [2, 3, 5] {
        let psi = random_state(n, &mut r);
        let purity: f64 = (0..n)
            .map(|i| {
                let red = dense_partial_trace_single(&psi, i);
                (&red * &red).trace().re
            })
            .sum();
        let oracle = 2.0 - 2.0 / n as f64 * purity;
        assert!((meyer_wallach(&psi) - oracle).abs() < 1e-12);
    }
}

fn dipolar_oracle(c: &CouplingModel) -> CMatrix {
    use PauliLabel::{X, Y, Z};
    let n = c.n_spins();
    let mut m = CMatrix::zeros(1 << n, 1 << n);
    for i in 0..n {
        for j in i + 1..n {
            let b = C64::new(c.b(i, j), 0.0);
            m += (kron_string(n, &[(i, Z), (j, Z)])
                - (kron_string(n, &[(i, X), (j, X)]) + kron_string(n, &[(i, Y), (j, Y)]))
                    * C64::new(0.5, 0.0))
                * b;
        }
    }
    m
}

fn gr2_oracle(c: &CouplingModel, only: Option<usize>) -> CMatrix {
    use PauliLabel::{Minus, Plus};
    let n = c.n_spins();
    let mut m = CMatrix::zeros(1 << n, 1 << n);
    for i in 0..n {
        for j in i + 1..n {
            if only.is_some_and(|f| i != f && j != f) {
                continue;
            }
            let b = C64::new(c.b(i, j), 0.0);
            m += (kron_string(n, &[(i, Plus), (j, Plus)])
                + kron_string(n, &[(i, Minus), (j, Minus)]))
                * b;
        }
    }
    m
}

#[test]
fn builders_match_kronecker_sums() {
    let mut r = rng(5);
    for n in 2..=6 {
        let c = CouplingModel::from_matrix(n, random_couplings(n, &mut r)).unwrap();
        assert!((dipolar(&c).unwrap().to_dense(CAP).unwrap() - dipolar_oracle(&c)).norm() < 1e-12);
        assert!((gr2(&c).unwrap().to_dense(CAP).unwrap() - gr2_oracle(&c, None)).norm() < 1e-12);
        for f in 0..n {
            assert!(
                (gr1(&c, f).unwrap().to_dense(CAP).unwrap() - gr2_oracle(&c, Some(f))).norm()
                    < 1e-12
            );
        }
    }
}

#[test]
fn matrix_free_apply_matches_dense() {
    let mut r = rng(6);
    for n in 2..=6 {
        let c = CouplingModel::from_matrix(n, random_couplings(n, &mut r)).unwrap();
        for h in [
            dipolar(&c).unwrap(),
            gr2(&c).unwrap(),
            gr1(&c, n - 1).unwrap(),
            grn(n, 0.8).unwrap(),
        ] {
            let psi = random_state(n, &mut r);
            let dense = h.to_dense(CAP).unwrap() * column(&psi);
            let free = h.apply(psi.amplitudes()).unwrap();
            assert!(max_abs_diff(&free, dense.as_slice()) < 1e-12);
        }
    }
}

#[test]
fn builders_are_hermitian_and_respect_coherence_order() {
    let mut r = rng(7);
    for n in 2..=6 {
        let c = CouplingModel::from_matrix(n, random_couplings(n, &mut r)).unwrap();
        let dip = dipolar(&c).unwrap().to_dense(CAP).unwrap();
        let sz = collective(n, PauliLabel::Z, &(0..n).collect::<Vec<_>>())
            .unwrap()
            .to_dense(CAP)
            .unwrap();
        assert!((&dip * &sz - &sz * &dip).norm() < 1e-12);
        let checks: [(CMatrix, u32); 4] = [
            (dip.clone(), 0),
            (gr2(&c).unwrap().to_dense(CAP).unwrap(), 2),
            (gr1(&c, 0).unwrap().to_dense(CAP).unwrap(), 2),
            (grn(n, 1.0).unwrap().to_dense(CAP).unwrap(), n as u32),
        ];
        for (m, order) in checks {
            assert!((&m - m.adjoint()).norm() < 1e-12);
            for row in 0..m.nrows() {
                for col in 0..m.ncols() {
                    let dw =
                        (row.count_ones() as i64 - col.count_ones() as i64).unsigned_abs() as u32;
                    if m[(row, col)].norm() > 0.0 {
                        assert!(
                            dw == order || (order == 0 && dw == 0),
                            "order {order} element ({row},{col})"
                        );
                    }
                }
            }
        }
        let psi = random_state(n, &mut r);
        let e = gr2(&c).unwrap().expectation(psi.amplitudes()).unwrap();
        assert!(e.im.abs() < 1e-12);
    }
}

#[test]
fn all_up_dipolar_energy_is_coupling_sum() {
    let c = CouplingModel::dipolar_chain(5, 1.3).unwrap();
    let psi = QubitRegister::zeros(5).unwrap();
    let e = dipolar(&c).unwrap().expectation(psi.amplitudes()).unwrap();
    let sum: f64 = c.pairs().map(|(_, _, b)| b).sum();
    assert!((e.re - sum).abs() < 1e-12);
}

#[test]
fn rotated_dipolar_identity_pins_prefactor() {
    let mut r = rng(8);
    for n in 2..=6 {
        let c = CouplingModel::from_matrix(n, random_couplings(n, &mut r)).unwrap();
        let rotated = dipolar(&c)
            .unwrap()
            .rotate_y90(CAP)
            .unwrap()
            .to_dense(CAP)
            .unwrap();
        let dip = dipolar(&c).unwrap().to_dense(CAP).unwrap();
        let dq = gr2(&c).unwrap().to_dense(CAP).unwrap();
        let half = C64::new(0.5, 0.0);
        let with = |pref: f64| (&rotated - (&dq * C64::new(pref, 0.0) - &dip * half)).norm();
        assert!(with(1.5) < 1e-10, "n={n} residual {}", with(1.5));
        assert!(with(3.0 / 8.0) > 1e-3);
        assert!(with(0.75) > 1e-3);
    }
}

#[test]
fn rotation_conjugation_examples() {
    let n = 3;
    let id = HamiltonianOperator::from_dense(n, CMatrix::identity(8, 8), "I").unwrap();
    let rid = id.rotate_y90(CAP).unwrap().to_dense(CAP).unwrap();
    assert!((rid - CMatrix::identity(8, 8)).norm() < 1e-12);

    let z = collective(n, PauliLabel::Z, &[1]).unwrap();
    let twice = z
        .rotate_y90(CAP)
        .unwrap()
        .rotate_y90(CAP)
        .unwrap()
        .to_dense(CAP)
        .unwrap();
    assert!((twice + z.to_dense(CAP).unwrap()).norm() < 1e-12);
    let x_after_once = z.rotate_y90(CAP).unwrap().to_dense(CAP).unwrap();
    assert!((x_after_once - kron_string(n, &[(1, PauliLabel::X)])).norm() < 1e-12);

    let zz = HamiltonianOperator::from_terms(
        n,
        vec![spinamp::PauliTerm::new(
            C64::new(1.0, 0.0),
            &[(0, PauliLabel::Z), (2, PauliLabel::Z)],
        )
        .unwrap()],
        "zz",
    )
    .unwrap();
    let twice = zz
        .rotate_y90(CAP)
        .unwrap()
        .rotate_y90(CAP)
        .unwrap()
        .to_dense(CAP)
        .unwrap();
    assert!((twice - zz.to_dense(CAP).unwrap()).norm() < 1e-12);
}

#[test]
fn dense_eig_matches_taylor_oracle() {
    let mut r = rng(9);
    for n in 2..=6 {
        let c = CouplingModel::from_matrix(n, random_couplings(n, &mut r)).unwrap();
        let h = dipolar(&c)
            .unwrap()
            .add(&gr1(&c, 0).unwrap().scaled(0.7), CAP)
            .unwrap();
        let psi = random_state(n, &mut r);
        let t = 0.9;
        let oracle = expm_taylor(&h.to_dense(CAP).unwrap(), t) * column(&psi);
        let dense = expm_apply(&h, t, &psi, &ExpParams::dense()).unwrap();
        let krylov = expm_apply(&h, t, &psi, &ExpParams::krylov()).unwrap();
        assert!(max_abs_diff(dense.amplitudes(), oracle.as_slice()) < 1e-9);
        assert!(max_abs_diff(krylov.amplitudes(), oracle.as_slice()) < 1e-9);
    }
}

#[test]
fn complex_hermitian_dense_path_matches_taylor() {
    let mut r = rng(10);
    let m = random_hermitian(16, &mut r);
    let h = HamiltonianOperator::from_dense(4, m.clone(), "random").unwrap();
    let psi = random_state(4, &mut r);
    let oracle = expm_taylor(&m, 1.7) * column(&psi);
    for p in [ExpParams::dense(), ExpParams::krylov()] {
        let out = expm_apply(&h, 1.7, &psi, &p).unwrap();
        assert!(max_abs_diff(out.amplitudes(), oracle.as_slice()) < 1e-9);
    }
}

#[test]
fn krylov_matches_dense_on_eight_spins() {
    let mut r = rng(11);
    let c = CouplingModel::dipolar_chain(8, 1.0).unwrap();
    let h = dipolar(&c)
        .unwrap()
        .add(&gr1(&c, 0).unwrap().scaled(2.0), CAP)
        .unwrap();
    for t in [0.5, std::f64::consts::PI / std::f64::consts::SQRT_2, 7.0] {
        let psi = random_state(8, &mut r);
        let a = expm_apply(&h, t, &psi, &ExpParams::dense()).unwrap();
        let b = expm_apply(&h, t, &psi, &ExpParams::krylov()).unwrap();
        let deficit = 1.0 - a.inner(&b).unwrap().norm();
        assert!(deficit < 1e-9, "t={t} deficit {deficit}");
        assert!(max_abs_diff(a.amplitudes(), b.amplitudes()) < 1e-9);
    }
}

#[test]
fn grn_quarter_period_builds_cat_state() {
    for n in 2..=8 {
        let out = expm_apply(
            &grn(n, 1.0).unwrap(),
            FRAC_PI_4,
            &QubitRegister::zeros(n).unwrap(),
            &ExpParams::default(),
        )
        .unwrap();
        let cat = cat_state(n);
        assert!(max_abs_diff(out.amplitudes(), cat.amplitudes()) < 1e-12);
        let overlap = QubitRegister::zeros(n).unwrap().inner(&out).unwrap();
        assert!((overlap - C64::new(FRAC_1_SQRT_2, 0.0)).norm() < 1e-12);
    }
}

#[test]
fn semigroup_and_norm() {
    let mut r = rng(12);
    let c = CouplingModel::dipolar_chain(6, 1.0).unwrap();
    let h = dipolar(&c).unwrap().add(&gr1(&c, 0).unwrap(), CAP).unwrap();
    for p in [ExpParams::dense(), ExpParams::krylov()] {
        let psi = random_state(6, &mut r);
        let ab = expm_apply(&h, 0.4, &expm_apply(&h, 1.1, &psi, &p).unwrap(), &p).unwrap();
        let sum = expm_apply(&h, 1.5, &psi, &p).unwrap();
        assert!(max_abs_diff(ab.amplitudes(), sum.amplitudes()) < 1e-9);
        assert!((sum.norm_sqr() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn controlled_evolve_branches() {
    let mut r = rng(13);
    let n_amp = 3;
    let c = CouplingModel::dipolar_chain(n_amp, 1.0).unwrap();
    let h = gr1(&c, 0).unwrap().embed(n_amp + 1).unwrap();
    let p = ExpParams::default();
    let amp = random_state(n_amp, &mut r);
    let ctrl = |bit: &str| QubitRegister::basis_state(1, bit).unwrap();

    let off = amp.tensor_high(&ctrl("0")).unwrap();
    let out = controlled_evolve(n_amp, &h, 0.8, &off, &p).unwrap();
    assert!(max_abs_diff(out.amplitudes(), off.amplitudes()) < 1e-15);

    let on = amp.tensor_high(&ctrl("1")).unwrap();
    let out = controlled_evolve(n_amp, &h, 0.8, &on, &p).unwrap();
    let direct = expm_apply(&gr1(&c, 0).unwrap(), 0.8, &amp, &p).unwrap();
    let factor = out.condition_on(n_amp, true).unwrap();
    assert!(max_abs_diff(factor.amplitudes(), direct.amplitudes()) < 1e-12);

    // |+⟩ control entangles whenever the evolution acts nontrivially
    let plus =
        QubitRegister::from_amplitudes(vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0)]).unwrap();
    let zero_amp = QubitRegister::zeros(n_amp).unwrap();
    let out = controlled_evolve(n_amp, &h, 0.8, &zero_amp.tensor_high(&plus).unwrap(), &p).unwrap();
    assert!(out.reduce_single(n_amp).unwrap().purity() < 1.0 - 1e-6);
    assert!((out.norm_sqr() - 1.0).abs() < 1e-12);
}

fn arb_unitary_2x2() -> impl Strategy<Value = CMatrix> {
    (
        0.0..std::f64::consts::TAU,
        0.0..std::f64::consts::TAU,
        0.0..std::f64::consts::TAU,
        0.0..std::f64::consts::TAU,
    )
        .prop_map(|(a, b, c, d)| {
            let (s, co) = (0.5 * b).sin_cos();
            let e = |x: f64| C64::from_polar(1.0, x);
            DMatrix::from_row_slice(
                2,
                2,
                &[e(a) * co, -e(a + c) * s, e(a + d) * s, e(a + c + d) * co],
            )
        })
}

fn arb_state(max_n: usize) -> impl Strategy<Value = QubitRegister> {
    (1..=max_n).prop_flat_map(|n| {
        proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1 << n).prop_filter_map(
            "zero",
            |v| {
                QubitRegister::from_amplitudes(v.into_iter().map(|(a, b)| C64::new(a, b)).collect())
                    .ok()
            },
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn unitary_local_ops_preserve_norm(psi in arb_state(6), u in arb_unitary_2x2(), q in 0usize..6) {
        let mut s = psi.clone();
        let q = q % s.n_qubits();
        s.apply_local(&u, &[q]).unwrap();
        prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn reductions_are_valid_density_matrices(psi in arb_state(6), i in 0usize..6) {
        let red = psi.reduce_single(i % psi.n_qubits()).unwrap();
        prop_assert!((red.trace().re - 1.0).abs() < 1e-12);
        prop_assert!(red.trace().im.abs() < 1e-12);
        prop_assert!(red.hermiticity_residual() < 1e-12);
        let [lo, hi] = red.eigenvalues();
        prop_assert!(lo >= -1e-12 && hi <= 1.0 + 1e-12);
    }

    #[test]
    fn meyer_wallach_invariant_under_local_unitaries(psi in arb_state(5), u in arb_unitary_2x2()) {
        let q0 = meyer_wallach(&psi);
        let mut s = psi.clone();
        for q in 0..s.n_qubits() {
            s.apply_local(&u, &[q]).unwrap();
        }
        prop_assert!((meyer_wallach(&s) - q0).abs() < 1e-10);
        prop_assert!((-1e-12..=1.0 + 1e-9).contains(&q0));
    }

    #[test]
    fn magnetization_is_linear_in_probabilities(psi in arb_state(5)) {
        let n = psi.n_qubits();
        let all: Vec<usize> = (0..n).collect();
        let per_spin: f64 = (0..n).map(|i| psi.reduce_single(i).unwrap().sigma_z()).sum();
        let mz = spinamp::magnetization(&psi, &all).unwrap();
        prop_assert!((mz - per_spin).abs() < 1e-12);
        prop_assert!(mz.abs() <= n as f64 + 1e-9);
    }

    #[test]
    fn contrast_is_antisymmetric(a in -10.0f64..10.0, b in -10.0f64..10.0, m in 0.5f64..10.0) {
        prop_assert_eq!(spinamp::contrast(a, b, m).unwrap(), -spinamp::contrast(b, a, m).unwrap());
    }
}
