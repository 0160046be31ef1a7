use serde::{Deserialize, Serialize};

use super::state::{check_register, StateVector};
use crate::{Error, Result};

/// Where an Ry gate takes its angle from at run time.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AngleSlot {
    /// Per-qubit encoding angle supplied with each input.
    Encoding(usize),
    /// Trainable ansatz parameter, block-major.
    Param(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gate {
    Ry { qubit: usize, angle: AngleSlot },
    Cnot { control: usize, target: usize },
}

impl Gate {
    pub fn qubits(&self) -> ([usize; 2], usize) {
        match *self {
            Gate::Ry { qubit, .. } => ([qubit, 0], 1),
            Gate::Cnot { control, target } => ([control, target], 2),
        }
    }
}

/// Encoder followed by `depth` ansatz blocks.
///
/// The encoder is one Ry per qubit. Each block is an Ry on every qubit in
/// ascending order followed by the open CNOT chain `q0→q1, …, q(n−2)→q(n−1)`.
/// Trainable parameters are laid out block-major: index `b·n + q`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "TemplateShape", into = "TemplateShape")]
pub struct CircuitTemplate {
    n_qubits: usize,
    depth: usize,
    gates: Vec<Gate>,
}

#[derive(Clone, Copy, Serialize, Deserialize)]
struct TemplateShape {
    n_qubits: usize,
    depth: usize,
}

impl TryFrom<TemplateShape> for CircuitTemplate {
    type Error = Error;
    fn try_from(s: TemplateShape) -> Result<Self> {
        CircuitTemplate::new(s.n_qubits, s.depth)
    }
}

impl From<CircuitTemplate> for TemplateShape {
    fn from(t: CircuitTemplate) -> Self {
        TemplateShape {
            n_qubits: t.n_qubits,
            depth: t.depth,
        }
    }
}

impl CircuitTemplate {
    /// `depth = 0` gives the bare encoder.
    pub fn new(n_qubits: usize, depth: usize) -> Result<Self> {
        check_register(n_qubits)?;
        let mut gates = Vec::with_capacity(n_qubits * (depth + 1) + depth * n_qubits);
        gates.extend((0..n_qubits).map(|q| Gate::Ry {
            qubit: q,
            angle: AngleSlot::Encoding(q),
        }));
        for block in 0..depth {
            gates.extend((0..n_qubits).map(|q| Gate::Ry {
                qubit: q,
                angle: AngleSlot::Param(block * n_qubits + q),
            }));
            gates.extend((0..n_qubits.saturating_sub(1)).map(|q| Gate::Cnot {
                control: q,
                target: q + 1,
            }));
        }
        Ok(Self {
            n_qubits,
            depth,
            gates,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn n_params(&self) -> usize {
        self.depth * self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn check_inputs(&self, encoding: &[f64], params: &[f64]) -> Result<()> {
        if encoding.len() != self.n_qubits {
            return Err(Error::shape("encoding angles", self.n_qubits, encoding.len()));
        }
        if params.len() != self.n_params() {
            return Err(Error::shape("ansatz parameters", self.n_params(), params.len()));
        }
        Ok(())
    }

    #[inline]
    pub(crate) fn angle(slot: AngleSlot, encoding: &[f64], params: &[f64]) -> f64 {
        match slot {
            AngleSlot::Encoding(i) => encoding[i],
            AngleSlot::Param(j) => params[j],
        }
    }

    /// Final state after encoding and all ansatz blocks, starting from `|0…0⟩`.
    pub fn prepare(&self, encoding: &[f64], params: &[f64]) -> Result<StateVector> {
        self.check_inputs(encoding, params)?;
        let mut state = StateVector::zero(self.n_qubits)?;
        for gate in &self.gates {
            match *gate {
                Gate::Ry { qubit, angle } => {
                    state.apply_ry(qubit, Self::angle(angle, encoding, params))?
                }
                Gate::Cnot { control, target } => state.apply_cnot(control, target)?,
            }
        }
        Ok(state)
    }

    /// Z-sum readout of [`prepare`](Self::prepare).
    pub fn run(&self, encoding: &[f64], params: &[f64]) -> Result<f64> {
        Ok(self.prepare(encoding, params)?.expect_z_sum())
    }
}

pub fn run_template(template: &CircuitTemplate, encoding: &[f64], params: &[f64]) -> Result<f64> {
    template.run(encoding, params)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gate_layout() {
        let t = CircuitTemplate::new(3, 2).unwrap();
        assert_eq!(t.n_params(), 6);
        let g = t.gates();
        // 3 encoding Ry, then per block 3 Ry + 2 CNOT
        assert_eq!(g.len(), 3 + 2 * 5);
        assert_eq!(g[3], Gate::Ry { qubit: 0, angle: AngleSlot::Param(0) });
        assert_eq!(g[6], Gate::Cnot { control: 0, target: 1 });
        assert_eq!(g[7], Gate::Cnot { control: 1, target: 2 });
        assert_eq!(g[10], Gate::Ry { qubit: 2, angle: AngleSlot::Param(5) });
    }

    #[test]
    fn all_zero_angles_stay_in_ground_state() {
        let t = CircuitTemplate::new(4, 2).unwrap();
        assert_eq!(t.run(&[0.0; 4], &[0.0; 8]).unwrap(), 4.0);
    }

    #[test]
    fn single_qubit_angles_add() {
        let t = CircuitTemplate::new(1, 1).unwrap();
        for (a, p) in [(0.3, 0.4), (1.0, -2.5), (3.0, 3.0)] {
            let e = t.run(&[a], &[p]).unwrap();
            assert!((e - f64::cos(a + p)).abs() < 1e-12);
        }
    }

    #[test]
    fn shape_errors() {
        let t = CircuitTemplate::new(2, 1).unwrap();
        assert!(matches!(t.run(&[0.0], &[0.0, 0.0]), Err(Error::Shape { .. })));
        assert!(matches!(t.run(&[0.0, 0.0], &[0.0]), Err(Error::Shape { .. })));
    }

    #[test]
    fn serde_keeps_only_shape() {
        let t = CircuitTemplate::new(4, 3).unwrap();
        let json = serde_json::to_string(&t).unwrap();
        assert_eq!(json, r#"{"n_qubits":4,"depth":3}"#);
        let back: CircuitTemplate = serde_json::from_str(&json).unwrap();
        assert_eq!(back, t);
        assert!(serde_json::from_str::<CircuitTemplate>(r#"{"n_qubits":40,"depth":1}"#).is_err());
    }
}
