mod common;

use hqnn_core::noise::{DensityMatrix, KrausChannel, NoiseModel, NoiseProfile};
use hqnn_core::quantum::{run_template, CircuitTemplate, StateVector};
use nalgebra::DVector;
use num_complex::Complex64;
use proptest::prelude::*;

use common::*;

fn angles(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-7.0..7.0f64, len)
}

fn instance(max_n: usize) -> impl Strategy<Value = (usize, usize, Vec<f64>, Vec<f64>)> {
    (1..=max_n, 0..=3usize).prop_flat_map(|(n, d)| (Just(n), Just(d), angles(n), angles(n * d)))
}

/// Reference noisy run: dense density matrix, Kraus sums from textbook
/// operators, channels placed after every gate.
fn noisy_oracle(p: &NoiseProfile, n: usize, d: usize, enc: &[f64], params: &[f64]) -> f64 {
    let gamma = 1.0 - (-p.gate_time_seconds / p.t1_seconds).exp();
    let rate = 1.0 / p.t2_seconds - 1.0 / (2.0 * p.t1_seconds);
    let lambda = (1.0 - (-p.gate_time_seconds * rate).exp()).max(0.0);
    let dep1 = depolarizing_ops(p.sx_error, 1);
    let dep2 = depolarizing_ops(p.two_qubit_error, 2);
    let amp = amplitude_damping_ops(gamma);
    let phase = phase_damping_ops(lambda);
    let dim = 1 << n;
    let mut rho = CMat::zeros(dim, dim);
    rho[(0, 0)] = c(1.0);
    for step in circuit(n, d, enc, params) {
        match step {
            Step::Ry(q, t) => {
                let u = embed1(&ry(t), q, n);
                rho = &u * rho * u.adjoint();
                rho = apply_kraus(&rho, &dep1, &[q], n);
                rho = apply_kraus(&rho, &amp, &[q], n);
                rho = apply_kraus(&rho, &phase, &[q], n);
            }
            Step::Cnot(a, b) => {
                let u = embed2(&cnot_local(), a, b, n);
                rho = &u * rho * u.adjoint();
                rho = apply_kraus(&rho, &dep2, &[a, b], n);
                for q in [a, b] {
                    rho = apply_kraus(&rho, &amp, &[q], n);
                    rho = apply_kraus(&rho, &phase, &[q], n);
                }
            }
        }
    }
    (1.0 - 2.0 * p.readout_error) * (z_sum(n) * rho).trace().re
}

fn profile() -> impl Strategy<Value = NoiseProfile> {
    (0.0..0.3f64, 0.0..0.3f64, 0.0..0.5f64, 1e-6..1e-3f64, 0.2..2.0f64, 1e-8..1e-6f64).prop_map(
        |(two, sx, ro, t1, t2_ratio, gate)| NoiseProfile {
            name: "random".into(),
            two_qubit_error: two,
            sx_error: sx,
            readout_error: ro,
            t1_seconds: t1,
            t2_seconds: t1 * t2_ratio,
            gate_time_seconds: gate,
        },
    )
}

fn random_density(n: usize, seeds: &[f64]) -> DensityMatrix {
    let mut rho = DensityMatrix::zero(n).unwrap();
    for (q, &t) in seeds.iter().enumerate().take(n) {
        rho.apply_ry(q, t).unwrap();
    }
    for q in 0..n.saturating_sub(1) {
        rho.apply_cnot(q, q + 1).unwrap();
    }
    let mixing = KrausChannel::depolarizing(0.2, 1).unwrap();
    rho.apply_channel(&mixing, &[0]).unwrap();
    for (q, &t) in seeds.iter().enumerate().skip(n).take(n) {
        rho.apply_ry(q - n, t).unwrap();
    }
    rho
}

fn to_cmat(op: &[Complex64]) -> CMat {
    let d = (op.len() as f64).sqrt() as usize;
    CMat::from_row_slice(d, d, op)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn statevector_matches_dense_oracle((n, d, enc, params) in instance(3)) {
        let t = CircuitTemplate::new(n, d).unwrap();
        let e = run_template(&t, &enc, &params).unwrap();
        prop_assert!((e - oracle_expectation(n, d, &enc, &params)).abs() < 1e-12);
    }

    #[test]
    fn prepared_state_matches_dense_unitary((n, d, enc, params) in instance(3)) {
        let t = CircuitTemplate::new(n, d).unwrap();
        let psi = t.prepare(&enc, &params).unwrap();
        let mut zero = DVector::<Complex64>::zeros(1 << n);
        zero[0] = c(1.0);
        let reference = unitary(n, &circuit(n, d, &enc, &params)) * zero;
        for (a, b) in psi.amplitudes().iter().zip(reference.iter()) {
            prop_assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn gates_preserve_norm(n in 1..=6usize, ops in prop::collection::vec((0..6usize, 0..6usize, -7.0..7.0f64), 1..40)) {
        let mut psi = StateVector::zero(n).unwrap();
        for (a, b, theta) in ops {
            let (a, b) = (a % n, b % n);
            if a == b {
                psi.apply_ry(a, theta).unwrap();
            } else {
                psi.apply_cnot(a, b).unwrap();
            }
        }
        prop_assert!((psi.norm() - 1.0).abs() < 1e-12);
        prop_assert!(psi.expect_z_sum().abs() <= n as f64 + 1e-12);
    }

    #[test]
    fn density_matches_statevector((n, d, enc, params) in instance(4)) {
        let t = CircuitTemplate::new(n, d).unwrap();
        let psi = t.prepare(&enc, &params).unwrap();
        let mut rho = DensityMatrix::zero(n).unwrap();
        for g in t.gates() {
            match *g {
                hqnn_core::quantum::Gate::Ry { qubit, angle } => {
                    let theta = match angle {
                        hqnn_core::quantum::AngleSlot::Encoding(i) => enc[i],
                        hqnn_core::quantum::AngleSlot::Param(j) => params[j],
                    };
                    rho.apply_ry(qubit, theta).unwrap();
                }
                hqnn_core::quantum::Gate::Cnot { control, target } => rho.apply_cnot(control, target).unwrap(),
            }
        }
        let pure = DensityMatrix::from_statevector(&psi).unwrap();
        for (a, b) in rho.entries().iter().zip(pure.entries()) {
            prop_assert!((a - b).norm() < 1e-12);
        }
        prop_assert!((rho.purity() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn noisy_simulation_matches_dense_kraus_oracle(p in profile(), (n, d, enc, params) in instance(3)) {
        let t = CircuitTemplate::new(n, d).unwrap();
        let e = NoiseModel::new(&p).unwrap().run(&t, &enc, &params).unwrap();
        let reference = noisy_oracle(&p, n, d, &enc, &params);
        prop_assert!((e - reference).abs() < 1e-10, "{e} vs {reference}");
    }

    #[test]
    fn channels_match_dense_kraus_oracle(
        seeds in prop::collection::vec(0.0..6.3f64, 6),
        p in 0.0..1.0f64,
        a in 0..3usize,
        shift in 1..3usize,
        kind in 0..4usize,
    ) {
        let n = 3;
        let rho = random_density(n, &seeds);
        let (channel, ops, qubits) = match kind {
            0 => (KrausChannel::depolarizing(p, 1).unwrap(), depolarizing_ops(p, 1), vec![a]),
            1 => (KrausChannel::depolarizing(p, 2).unwrap(), depolarizing_ops(p, 2), vec![a, (a + shift) % n]),
            2 => (KrausChannel::amplitude_damping(p).unwrap(), amplitude_damping_ops(p), vec![a]),
            _ => (KrausChannel::phase_damping(p).unwrap(), phase_damping_ops(p), vec![a]),
        };
        let reference = apply_kraus(&to_cmat(rho.entries()), &ops, &qubits, n);
        let mut out = rho.clone();
        out.apply_channel(&channel, &qubits).unwrap();
        prop_assert!(max_abs_diff(&reference, out.entries()) < 1e-12);
        prop_assert!((out.trace().re - 1.0).abs() < 1e-10);
        prop_assert!(out.hermiticity_error() < 1e-10);
        prop_assert!(min_eigenvalue(&to_cmat(out.entries())) > -1e-10);
    }

    #[test]
    fn depolarizing_degrades_monotonically(theta in 0.0..6.3f64, p1 in 0.0..0.75f64, p2 in 0.0..0.75f64) {
        let (lo, hi) = if p1 <= p2 { (p1, p2) } else { (p2, p1) };
        let z = |p: f64| {
            let mut rho = DensityMatrix::zero(1).unwrap();
            rho.apply_ry(0, theta).unwrap();
            rho.apply_channel(&KrausChannel::depolarizing(p, 1).unwrap(), &[0]).unwrap();
            rho.expect_z(0).unwrap().abs()
        };
        prop_assert!(z(hi) <= z(lo) + 1e-12);
    }

    #[test]
    fn partial_trace_preserves_marginals(seeds in prop::collection::vec(0.0..6.3f64, 6), q in 0..3usize) {
        let rho = random_density(3, &seeds);
        let reduced = rho.partial_trace_keep(&[q]).unwrap();
        prop_assert!((reduced.trace().re - 1.0).abs() < 1e-12);
        prop_assert!((reduced.expect_z(0).unwrap() - rho.expect_z(q).unwrap()).abs() < 1e-12);
    }
}

#[test]
fn fully_depolarizing_point_is_three_quarters() {
    let mut rho = DensityMatrix::zero(1).unwrap();
    rho.apply_ry(0, 0.9).unwrap();
    let before = rho.expect_z(0).unwrap();
    let mut mixed = rho.clone();
    mixed.apply_channel(&KrausChannel::depolarizing(0.75, 1).unwrap(), &[0]).unwrap();
    assert!(mixed.expect_z(0).unwrap().abs() < 1e-15);
    assert!((mixed.purity() - 0.5).abs() < 1e-15);
    // p = 1 with this operator-sum form inverts the Bloch vector to −r/3
    rho.apply_channel(&KrausChannel::depolarizing(1.0, 1).unwrap(), &[0]).unwrap();
    assert!((rho.expect_z(0).unwrap() + before / 3.0).abs() < 1e-15);
}
