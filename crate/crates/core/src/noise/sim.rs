use super::channel::KrausChannel;
use super::density::DensityMatrix;
use super::profile::{damping_channels, NoiseProfile};
use crate::quantum::{CircuitTemplate, Gate};
use crate::Result;

/// A [`NoiseProfile`] compiled into the channels applied around each gate.
///
/// After an Ry on qubit `q`: 1-qubit depolarizing (SX error), amplitude
/// damping, phase damping on `q`. After a CNOT: 2-qubit depolarizing, then
/// amplitude and phase damping on control and on target. Readout scales each
/// `⟨Z_i⟩` by `1 − 2·p_readout`.
#[derive(Clone, Debug)]
pub struct NoiseModel {
    profile: NoiseProfile,
    depolarizing_1q: KrausChannel,
    depolarizing_2q: KrausChannel,
    amplitude: KrausChannel,
    phase: KrausChannel,
}

impl NoiseModel {
    pub fn new(profile: &NoiseProfile) -> Result<Self> {
        let (amplitude, phase) = damping_channels(profile)?;
        Ok(Self {
            profile: profile.clone(),
            depolarizing_1q: KrausChannel::depolarizing(profile.sx_error, 1)?,
            depolarizing_2q: KrausChannel::depolarizing(profile.two_qubit_error, 2)?,
            amplitude,
            phase,
        })
    }

    pub fn profile(&self) -> &NoiseProfile {
        &self.profile
    }

    pub fn channels(&self) -> [&KrausChannel; 4] {
        [
            &self.depolarizing_1q,
            &self.depolarizing_2q,
            &self.amplitude,
            &self.phase,
        ]
    }

    fn damp(&self, rho: &mut DensityMatrix, qubit: usize) -> Result<()> {
        rho.apply_channel(&self.amplitude, &[qubit])?;
        rho.apply_channel(&self.phase, &[qubit])
    }

    /// Noisy density-matrix evolution of the template.
    pub fn evolve(
        &self,
        template: &CircuitTemplate,
        encoding: &[f64],
        params: &[f64],
    ) -> Result<DensityMatrix> {
        template.check_inputs(encoding, params)?;
        let mut rho = DensityMatrix::zero(template.n_qubits())?;
        for gate in template.gates() {
            match *gate {
                Gate::Ry { qubit, angle } => {
                    rho.apply_ry(qubit, CircuitTemplate::angle(angle, encoding, params))?;
                    rho.apply_channel(&self.depolarizing_1q, &[qubit])?;
                    self.damp(&mut rho, qubit)?;
                }
                Gate::Cnot { control, target } => {
                    rho.apply_cnot(control, target)?;
                    rho.apply_channel(&self.depolarizing_2q, &[control, target])?;
                    self.damp(&mut rho, control)?;
                    self.damp(&mut rho, target)?;
                }
            }
        }
        Ok(rho)
    }

    /// `Σ_i (1 − 2·p_readout) ⟨σ_z^i⟩`.
    pub fn readout(&self, rho: &DensityMatrix) -> f64 {
        (1.0 - 2.0 * self.profile.readout_error) * rho.expect_z_sum()
    }

    pub fn run(&self, template: &CircuitTemplate, encoding: &[f64], params: &[f64]) -> Result<f64> {
        Ok(self.readout(&self.evolve(template, encoding, params)?))
    }
}

pub fn run_noisy_template(
    template: &CircuitTemplate,
    encoding: &[f64],
    params: &[f64],
    profile: &NoiseProfile,
) -> Result<f64> {
    NoiseModel::new(profile)?.run(template, encoding, params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::run_template;

    #[test]
    fn noiseless_profile_matches_statevector() {
        let t = CircuitTemplate::new(3, 2).unwrap();
        let enc = [0.4, 1.9, 2.6];
        let params = [0.1, -0.7, 1.3, 2.2, -1.1, 0.5];
        let exact = run_template(&t, &enc, &params).unwrap();
        let noisy = run_noisy_template(&t, &enc, &params, &NoiseProfile::noiseless()).unwrap();
        assert!((exact - noisy).abs() < 1e-10);
    }

    #[test]
    fn readout_only_closed_form() {
        let t = CircuitTemplate::new(1, 0).unwrap();
        let profile = NoiseProfile {
            readout_error: 0.25,
            ..NoiseProfile::noiseless()
        };
        let e = run_noisy_template(&t, &[0.0], &[], &profile).unwrap();
        assert!((e - 0.5).abs() < 1e-12);
    }

    #[test]
    fn hardware_noise_shrinks_expectation() {
        let t = CircuitTemplate::new(2, 1).unwrap();
        let fez = &super::super::default_profiles()["IBM-Fez"];
        let exact = run_template(&t, &[0.0, 0.0], &[0.0, 0.0]).unwrap();
        let noisy = run_noisy_template(&t, &[0.0, 0.0], &[0.0, 0.0], fez).unwrap();
        assert!(noisy < exact && noisy > 0.9 * exact);
    }
}
