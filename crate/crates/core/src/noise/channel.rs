use num_complex::Complex64;

use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Single-qubit Paulis `I, X, Y, Z`, row-major.
pub const PAULIS: [[Complex64; 4]; 4] = [
    [ONE, ZERO, ZERO, ONE],
    [ZERO, ONE, ONE, ZERO],
    [ZERO, Complex64::new(0.0, -1.0), I, ZERO],
    [ONE, ZERO, ZERO, Complex64::new(-1.0, 0.0)],
];

fn kron(a: &[Complex64], b: &[Complex64], da: usize, db: usize) -> Vec<Complex64> {
    let d = da * db;
    let mut out = vec![ZERO; d * d];
    for i in 0..da {
        for j in 0..da {
            for k in 0..db {
                for l in 0..db {
                    out[(i * db + k) * d + j * db + l] = a[i * da + j] * b[k * db + l];
                }
            }
        }
    }
    out
}

fn check_probability(name: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} = {p} is not a probability in [0, 1]")))
    }
}

/// Completely positive map `ρ → Σ K ρ K†` on one or two qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausChannel {
    arity: usize,
    operators: Vec<Vec<Complex64>>,
    identity: bool,
}

impl KrausChannel {
    pub fn identity(arity: usize) -> Self {
        let d = 1 << arity;
        let mut op = vec![ZERO; d * d];
        for i in 0..d {
            op[i * d + i] = ONE;
        }
        Self {
            arity,
            operators: vec![op],
            identity: true,
        }
    }

    /// Arbitrary operators, each `2^arity × 2^arity` row-major. Trace
    /// preservation is checked to 1e-10.
    pub fn from_operators(arity: usize, operators: Vec<Vec<Complex64>>) -> Result<Self> {
        if !(1..=2).contains(&arity) {
            return Err(Error::Domain(format!("channel arity {arity} is not 1 or 2")));
        }
        let d = 1 << arity;
        for op in &operators {
            if op.len() != d * d {
                return Err(Error::shape("Kraus operator entries", d * d, op.len()));
            }
        }
        let ch = Self {
            arity,
            operators,
            identity: false,
        };
        let err = ch.trace_preservation_error();
        if err > 1e-10 {
            return Err(Error::Domain(format!(
                "Kraus operators are not trace preserving (max |ΣK†K − I| = {err:e})"
            )));
        }
        Ok(ch)
    }

    /// `(1−p)ρ + p/3 (XρX + YρY + ZρZ)` on one qubit, or the analogous mixture
    /// over the 15 non-identity two-qubit Paulis with weight `p/15` each.
    pub fn depolarizing(p: f64, arity: usize) -> Result<Self> {
        check_probability("depolarizing probability", p)?;
        if p == 0.0 {
            return Ok(Self::identity(arity));
        }
        let paulis: Vec<Vec<Complex64>> = match arity {
            1 => PAULIS.iter().map(|m| m.to_vec()).collect(),
            2 => {
                let mut all = Vec::with_capacity(16);
                for a in &PAULIS {
                    for b in &PAULIS {
                        all.push(kron(a, b, 2, 2));
                    }
                }
                all
            }
            _ => return Err(Error::Domain(format!("channel arity {arity} is not 1 or 2"))),
        };
        let others = (paulis.len() - 1) as f64;
        let mut operators = Vec::with_capacity(paulis.len());
        for (k, m) in paulis.into_iter().enumerate() {
            let w = if k == 0 { (1.0 - p).sqrt() } else { (p / others).sqrt() };
            if w > 0.0 {
                operators.push(m.into_iter().map(|x| x * w).collect());
            }
        }
        Ok(Self {
            arity,
            operators,
            identity: false,
        })
    }

    /// `K0 = [[1,0],[0,√(1−γ)]]`, `K1 = [[0,√γ],[0,0]]`.
    pub fn amplitude_damping(gamma: f64) -> Result<Self> {
        check_probability("amplitude damping gamma", gamma)?;
        if gamma == 0.0 {
            return Ok(Self::identity(1));
        }
        let r = Complex64::new((1.0 - gamma).sqrt(), 0.0);
        let g = Complex64::new(gamma.sqrt(), 0.0);
        Ok(Self {
            arity: 1,
            operators: vec![vec![ONE, ZERO, ZERO, r], vec![ZERO, g, ZERO, ZERO]],
            identity: false,
        })
    }

    /// `K0 = [[1,0],[0,√(1−λ)]]`, `K1 = [[0,0],[0,√λ]]`.
    pub fn phase_damping(lambda: f64) -> Result<Self> {
        check_probability("phase damping lambda", lambda)?;
        if lambda == 0.0 {
            return Ok(Self::identity(1));
        }
        let r = Complex64::new((1.0 - lambda).sqrt(), 0.0);
        let l = Complex64::new(lambda.sqrt(), 0.0);
        Ok(Self {
            arity: 1,
            operators: vec![vec![ONE, ZERO, ZERO, r], vec![ZERO, ZERO, ZERO, l]],
            identity: false,
        })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn operators(&self) -> &[Vec<Complex64>] {
        &self.operators
    }

    pub fn is_identity(&self) -> bool {
        self.identity
    }

    /// Largest entry of `|Σ K†K − I|`.
    pub fn trace_preservation_error(&self) -> f64 {
        let d = 1 << self.arity;
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                let mut s = ZERO;
                for k in &self.operators {
                    for r in 0..d {
                        s += k[r * d + i].conj() * k[r * d + j];
                    }
                }
                let target = if i == j { ONE } else { ZERO };
                worst = worst.max((s - target).norm());
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_probability_is_identity() {
        for arity in [1, 2] {
            let ch = KrausChannel::depolarizing(0.0, arity).unwrap();
            assert!(ch.is_identity());
            assert_eq!(ch.operators().len(), 1);
        }
    }

    #[test]
    fn operator_counts() {
        assert_eq!(KrausChannel::depolarizing(0.1, 1).unwrap().operators().len(), 4);
        assert_eq!(KrausChannel::depolarizing(0.1, 2).unwrap().operators().len(), 16);
        assert_eq!(KrausChannel::depolarizing(1.0, 1).unwrap().operators().len(), 3);
    }

    #[test]
    fn constructed_channels_are_trace_preserving() {
        for p in [2.703e-4, 0.01, 0.5, 1.0] {
            for arity in [1, 2] {
                let ch = KrausChannel::depolarizing(p, arity).unwrap();
                assert!(ch.trace_preservation_error() < 1e-12);
            }
            assert!(KrausChannel::amplitude_damping(p).unwrap().trace_preservation_error() < 1e-12);
            assert!(KrausChannel::phase_damping(p).unwrap().trace_preservation_error() < 1e-12);
        }
    }

    #[test]
    fn probabilities_are_validated() {
        assert!(matches!(KrausChannel::depolarizing(-0.1, 1), Err(Error::Domain(_))));
        assert!(matches!(KrausChannel::depolarizing(1.1, 2), Err(Error::Domain(_))));
        assert!(matches!(KrausChannel::depolarizing(0.1, 3), Err(Error::Domain(_))));
        assert!(KrausChannel::amplitude_damping(f64::NAN).is_err());
    }

    #[test]
    fn from_operators_rejects_non_tp() {
        let half = Complex64::new(0.5, 0.0);
        let bad = vec![vec![half, ZERO, ZERO, half]];
        assert!(KrausChannel::from_operators(1, bad).is_err());
    }
}
