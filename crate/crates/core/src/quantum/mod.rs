//! Exact statevector simulation of the Ry/CNOT circuits used by the regressor.

mod state;
mod template;

pub(crate) use state::{check_register, qubit_mask};
pub use state::{StateVector, MAX_QUBITS};
pub use template::{run_template, AngleSlot, CircuitTemplate, Gate};
