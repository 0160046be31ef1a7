use num_complex::Complex64;

use super::channel::KrausChannel;
use crate::quantum::{check_register, qubit_mask, StateVector};
use crate::{Error, Result};

/// Density matrices are dense `4^n` buffers; beyond this the simulator is not
/// practical.
pub const MAX_DENSITY_QUBITS: usize = 10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Mixed state of an `n`-qubit register, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    dim: usize,
    entries: Vec<Complex64>,
}

impl DensityMatrix {
    fn check_size(n_qubits: usize) -> Result<()> {
        check_register(n_qubits)?;
        if n_qubits > MAX_DENSITY_QUBITS {
            return Err(Error::Config(format!(
                "density-matrix simulation supports at most {MAX_DENSITY_QUBITS} qubits, got {n_qubits}"
            )));
        }
        Ok(())
    }

    pub fn zero(n_qubits: usize) -> Result<Self> {
        Self::check_size(n_qubits)?;
        let dim = 1 << n_qubits;
        let mut entries = vec![ZERO; dim * dim];
        entries[0] = Complex64::new(1.0, 0.0);
        Ok(Self {
            n_qubits,
            dim,
            entries,
        })
    }

    /// `ρ = |ψ⟩⟨ψ|`.
    pub fn from_statevector(psi: &StateVector) -> Result<Self> {
        let n_qubits = psi.n_qubits();
        Self::check_size(n_qubits)?;
        let amps = psi.amplitudes();
        let dim = amps.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for a in amps {
            entries.extend(amps.iter().map(|b| a * b.conj()));
        }
        Ok(Self {
            n_qubits,
            dim,
            entries,
        })
    }

    /// Row-major `2^n × 2^n` entries; no physicality check beyond shape.
    pub fn from_entries(n_qubits: usize, entries: Vec<Complex64>) -> Result<Self> {
        Self::check_size(n_qubits)?;
        let dim = 1 << n_qubits;
        if entries.len() != dim * dim {
            return Err(Error::shape("density matrix entries", dim * dim, entries.len()));
        }
        Ok(Self {
            n_qubits,
            dim,
            entries,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// `tr(ρ²)`.
    pub fn purity(&self) -> f64 {
        // tr(ρ²) = Σ_ij ρ_ij ρ_ji = Σ_ij |ρ_ij|² for Hermitian ρ
        let mut acc = ZERO;
        for i in 0..self.dim {
            for j in 0..self.dim {
                acc += self.get(i, j) * self.get(j, i);
            }
        }
        acc.re
    }

    /// Largest `|ρ_ij − conj(ρ_ji)|`.
    pub fn hermiticity_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    fn check_qubits(&self, qubits: &[usize]) -> Result<()> {
        for (k, &q) in qubits.iter().enumerate() {
            if q >= self.n_qubits {
                return Err(Error::Index {
                    index: q,
                    len: self.n_qubits,
                });
            }
            if qubits[..k].contains(&q) {
                return Err(Error::Domain(format!("qubit {q} listed twice")));
            }
        }
        Ok(())
    }

    pub fn expect_z(&self, qubit: usize) -> Result<f64> {
        self.check_qubits(&[qubit])?;
        let mask = qubit_mask(self.n_qubits, qubit);
        Ok((0..self.dim)
            .map(|x| {
                let p = self.get(x, x).re;
                if x & mask == 0 {
                    p
                } else {
                    -p
                }
            })
            .sum())
    }

    pub fn expect_z_sum(&self) -> f64 {
        let n = self.n_qubits as f64;
        (0..self.dim)
            .map(|x| self.get(x, x).re * (n - 2.0 * x.count_ones() as f64))
            .sum()
    }

    /// `ρ → U ρ U†` for a `2^k × 2^k` operator acting on `qubits` (first listed
    /// qubit is the most significant local bit).
    pub fn apply_unitary(&mut self, op: &[Complex64], qubits: &[usize]) -> Result<()> {
        self.check_qubits(qubits)?;
        let local = 1usize << qubits.len();
        if op.len() != local * local {
            return Err(Error::shape("local operator entries", local * local, op.len()));
        }
        let layout = LocalLayout::new(self.n_qubits, qubits);
        layout.left_multiply(&mut self.entries, self.dim, op);
        layout.right_multiply_adjoint(&mut self.entries, self.dim, op);
        Ok(())
    }

    pub fn apply_ry(&mut self, qubit: usize, theta: f64) -> Result<()> {
        if !theta.is_finite() {
            return Err(Error::Domain(format!("rotation angle {theta} is not finite")));
        }
        let (s, c) = (theta / 2.0).sin_cos();
        let op = [
            Complex64::new(c, 0.0),
            Complex64::new(-s, 0.0),
            Complex64::new(s, 0.0),
            Complex64::new(c, 0.0),
        ];
        self.apply_unitary(&op, &[qubit])
    }

    /// CNOT is a basis permutation, so `ρ'_ij = ρ_π(i)π(j)`.
    pub fn apply_cnot(&mut self, control: usize, target: usize) -> Result<()> {
        self.check_qubits(&[control, target])?;
        let cm = qubit_mask(self.n_qubits, control);
        let tm = qubit_mask(self.n_qubits, target);
        let perm = |i: usize| if i & cm != 0 { i ^ tm } else { i };
        let dim = self.dim;
        let old = self.entries.clone();
        for i in 0..dim {
            let pi = perm(i);
            for j in 0..dim {
                self.entries[i * dim + j] = old[pi * dim + perm(j)];
            }
        }
        Ok(())
    }

    /// `ρ → Σ_K K ρ K†` with the channel embedded on `qubits`.
    pub fn apply_channel(&mut self, channel: &KrausChannel, qubits: &[usize]) -> Result<()> {
        if qubits.len() != channel.arity() {
            return Err(Error::shape("channel qubits", channel.arity(), qubits.len()));
        }
        self.check_qubits(qubits)?;
        if channel.is_identity() {
            return Ok(());
        }
        let layout = LocalLayout::new(self.n_qubits, qubits);
        let mut out = vec![ZERO; self.entries.len()];
        let mut term = self.entries.clone();
        for op in channel.operators() {
            term.copy_from_slice(&self.entries);
            layout.left_multiply(&mut term, self.dim, op);
            layout.right_multiply_adjoint(&mut term, self.dim, op);
            for (o, t) in out.iter_mut().zip(&term) {
                *o += t;
            }
        }
        self.entries = out;
        Ok(())
    }

    /// Reduced state of the listed qubits (others traced out).
    pub fn partial_trace_keep(&self, keep: &[usize]) -> Result<DensityMatrix> {
        self.check_qubits(keep)?;
        let k = keep.len();
        let local = 1usize << k;
        let masks: Vec<usize> = keep.iter().map(|&q| qubit_mask(self.n_qubits, q)).collect();
        let keep_mask: usize = masks.iter().sum();
        let local_index = |x: usize| {
            masks
                .iter()
                .fold(0usize, |acc, &m| (acc << 1) | usize::from(x & m != 0))
        };
        let mut entries = vec![ZERO; local * local];
        for i in 0..self.dim {
            for j in 0..self.dim {
                if i & !keep_mask == j & !keep_mask {
                    entries[local_index(i) * local + local_index(j)] += self.get(i, j);
                }
            }
        }
        DensityMatrix::from_entries(k, entries)
    }
}

/// Index bookkeeping for an operator on a subset of qubits.
struct LocalLayout {
    /// Global masks of the local qubits, most significant local bit first.
    masks: Vec<usize>,
    /// Basis indices with every local bit cleared.
    bases: Vec<usize>,
    /// Offsets to add to a base for each local basis state.
    offsets: Vec<usize>,
}

impl LocalLayout {
    fn new(n_qubits: usize, qubits: &[usize]) -> Self {
        let masks: Vec<usize> = qubits.iter().map(|&q| qubit_mask(n_qubits, q)).collect();
        let all: usize = masks.iter().sum();
        let bases = (0..1usize << n_qubits).filter(|i| i & all == 0).collect();
        let k = masks.len();
        let offsets = (0..1usize << k)
            .map(|s| {
                masks
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| s & (1 << (k - 1 - j)) != 0)
                    .map(|(_, m)| m)
                    .sum()
            })
            .collect();
        Self {
            masks,
            bases,
            offsets,
        }
    }

    fn local_dim(&self) -> usize {
        1 << self.masks.len()
    }

    /// `M ← (op ⊗ I) M` acting on row indices.
    fn left_multiply(&self, m: &mut [Complex64], dim: usize, op: &[Complex64]) {
        let ld = self.local_dim();
        let mut v = vec![ZERO; ld];
        for col in 0..dim {
            for &b in &self.bases {
                for (s, off) in self.offsets.iter().enumerate() {
                    v[s] = m[(b + off) * dim + col];
                }
                for (a, off) in self.offsets.iter().enumerate() {
                    let row = &op[a * ld..(a + 1) * ld];
                    m[(b + off) * dim + col] = row.iter().zip(&v).map(|(o, x)| o * x).sum();
                }
            }
        }
    }

    /// `M ← M (op ⊗ I)†` acting on column indices.
    fn right_multiply_adjoint(&self, m: &mut [Complex64], dim: usize, op: &[Complex64]) {
        let ld = self.local_dim();
        let mut v = vec![ZERO; ld];
        for r in 0..dim {
            let row = &mut m[r * dim..(r + 1) * dim];
            for &b in &self.bases {
                for (s, off) in self.offsets.iter().enumerate() {
                    v[s] = row[b + off];
                }
                for (a, off) in self.offsets.iter().enumerate() {
                    let op_row = &op[a * ld..(a + 1) * ld];
                    row[b + off] = v.iter().zip(op_row).map(|(x, o)| x * o.conj()).sum();
                }
            }
        }
    }
}
