//! Density-matrix simulation under hardware-calibrated Kraus noise.

mod channel;
mod density;
mod profile;
mod sim;

pub use channel::{KrausChannel, PAULIS};
pub use density::{DensityMatrix, MAX_DENSITY_QUBITS};
pub use profile::{
    damping_channels, default_profiles, load_profiles, parse_catalog, NoiseProfile,
    CATALOG_FIELDS, DEFAULT_CATALOG,
};
pub use sim::{run_noisy_template, NoiseModel};
