//! Independent dense-matrix reference implementations.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn ry(theta: f64) -> CMat {
    let (s, co) = (theta / 2.0).sin_cos();
    CMat::from_row_slice(2, 2, &[c(co), c(-s), c(s), c(co)])
}

pub fn pauli(k: usize) -> CMat {
    let z = c(0.0);
    let one = c(1.0);
    let i = Complex64::new(0.0, 1.0);
    match k {
        0 => CMat::identity(2, 2),
        1 => CMat::from_row_slice(2, 2, &[z, one, one, z]),
        2 => CMat::from_row_slice(2, 2, &[z, -i, i, z]),
        _ => CMat::from_row_slice(2, 2, &[one, z, z, -one]),
    }
}

/// `op` acting on qubit `q` of `n`, qubit 0 being the most significant bit.
pub fn embed1(op: &CMat, q: usize, n: usize) -> CMat {
    let mut m = CMat::identity(1, 1);
    for k in 0..n {
        let f = if k == q { op.clone() } else { CMat::identity(2, 2) };
        m = m.kronecker(&f);
    }
    m
}

/// Two-qubit `op` on (a, b), basis ordered |a b⟩, embedded by permuting
/// computational basis states.
pub fn embed2(op: &CMat, a: usize, b: usize, n: usize) -> CMat {
    let dim = 1 << n;
    let bit = |x: usize, q: usize| (x >> (n - 1 - q)) & 1;
    let mut m = CMat::zeros(dim, dim);
    for col in 0..dim {
        let local_in = bit(col, a) * 2 + bit(col, b);
        for local_out in 0..4 {
            let amp = op[(local_out, local_in)];
            if amp == c(0.0) {
                continue;
            }
            let mut row = col;
            for (q, v) in [(a, local_out >> 1), (b, local_out & 1)] {
                let mask = 1 << (n - 1 - q);
                row = if v == 1 { row | mask } else { row & !mask };
            }
            m[(row, col)] += amp;
        }
    }
    m
}

pub fn cnot_local() -> CMat {
    let mut m = CMat::zeros(4, 4);
    for (r, col) in [(0, 0), (1, 1), (3, 2), (2, 3)] {
        m[(r, col)] = c(1.0);
    }
    m
}

pub fn z_sum(n: usize) -> CMat {
    let mut m = CMat::zeros(1 << n, 1 << n);
    for q in 0..n {
        m += embed1(&pauli(3), q, n);
    }
    m
}

/// One step of the reference circuit: encoding rotations, then `depth`
/// blocks of per-qubit rotations followed by a CNOT ladder.
pub enum Step {
    Ry(usize, f64),
    Cnot(usize, usize),
}

pub fn circuit(n: usize, depth: usize, encoding: &[f64], params: &[f64]) -> Vec<Step> {
    let mut steps: Vec<Step> = (0..n).map(|q| Step::Ry(q, encoding[q])).collect();
    for b in 0..depth {
        for q in 0..n {
            steps.push(Step::Ry(q, params[b * n + q]));
        }
        for q in 0..n.saturating_sub(1) {
            steps.push(Step::Cnot(q, q + 1));
        }
    }
    steps
}

/// Full unitary as an explicit product of 2^n × 2^n matrices.
pub fn unitary(n: usize, steps: &[Step]) -> CMat {
    let mut u = CMat::identity(1 << n, 1 << n);
    for s in steps {
        let g = match *s {
            Step::Ry(q, t) => embed1(&ry(t), q, n),
            Step::Cnot(a, b) => embed2(&cnot_local(), a, b, n),
        };
        u = g * u;
    }
    u
}

/// ⟨0|U† Z_sum U|0⟩ via matrix products.
pub fn oracle_expectation(n: usize, depth: usize, encoding: &[f64], params: &[f64]) -> f64 {
    let u = unitary(n, &circuit(n, depth, encoding, params));
    let mut zero = DVector::<Complex64>::zeros(1 << n);
    zero[0] = c(1.0);
    let psi = u * zero;
    (psi.adjoint() * z_sum(n) * &psi)[(0, 0)].re
}

/// Reference Kraus operator sets, built from the textbook definitions.
pub fn depolarizing_ops(p: f64, arity: usize) -> Vec<CMat> {
    if arity == 1 {
        let mut ops = vec![pauli(0) * c((1.0 - p).sqrt())];
        ops.extend((1..4).map(|k| pauli(k) * c((p / 3.0).sqrt())));
        ops
    } else {
        let mut ops = Vec::new();
        for a in 0..4 {
            for b in 0..4 {
                let w = if a == 0 && b == 0 { 1.0 - p } else { p / 15.0 };
                ops.push(pauli(a).kronecker(&pauli(b)) * c(w.sqrt()));
            }
        }
        ops
    }
}

pub fn amplitude_damping_ops(gamma: f64) -> Vec<CMat> {
    vec![
        CMat::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c((1.0 - gamma).sqrt())]),
        CMat::from_row_slice(2, 2, &[c(0.0), c(gamma.sqrt()), c(0.0), c(0.0)]),
    ]
}

pub fn phase_damping_ops(lambda: f64) -> Vec<CMat> {
    vec![
        CMat::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c((1.0 - lambda).sqrt())]),
        CMat::from_row_slice(2, 2, &[c(0.0), c(0.0), c(0.0), c(lambda.sqrt())]),
    ]
}

/// Σ K ρ K† with each local operator embedded into the full space.
pub fn apply_kraus(rho: &CMat, ops: &[CMat], qubits: &[usize], n: usize) -> CMat {
    let mut out = CMat::zeros(rho.nrows(), rho.ncols());
    for k in ops {
        let full = match qubits {
            [q] => embed1(k, *q, n),
            [a, b] => embed2(k, *a, *b, n),
            _ => unreachable!(),
        };
        out += &full * rho * full.adjoint();
    }
    out
}

pub fn completeness_error(ops: &[CMat]) -> f64 {
    let d = ops[0].nrows();
    let mut s = CMat::zeros(d, d);
    for k in ops {
        s += k.adjoint() * k;
    }
    (s - CMat::identity(d, d)).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(m: &CMat) -> f64 {
    let herm = (m + m.adjoint()) * c(0.5);
    herm.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}

pub fn max_abs_diff(a: &CMat, b: &[Complex64]) -> f64 {
    let n = a.nrows();
    (0..n * n)
        .map(|i| (a[(i / n, i % n)] - b[i]).norm())
        .fold(0.0, f64::max)
}

/// Central finite difference of `f` at `x` along coordinate `i`.
pub fn central_diff(f: impl Fn(&[f64]) -> f64, x: &[f64], i: usize, h: f64) -> f64 {
    let mut p = x.to_vec();
    p[i] += h;
    let plus = f(&p);
    p[i] -= 2.0 * h;
    let minus = f(&p);
    (plus - minus) / (2.0 * h)
}

/// `|a − b| / max(|b|, floor)`: relative error that degrades to absolute
/// (scaled by `1/floor`) for components near zero.
pub fn rel_err(a: f64, b: f64, floor: f64) -> f64 {
    (a - b).abs() / b.abs().max(floor)
}
