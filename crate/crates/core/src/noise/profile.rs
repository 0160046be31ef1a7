use std::path::Path;

use indexmap::IndexMap;
use log::warn;
use serde::{Deserialize, Serialize};

use super::channel::KrausChannel;
use crate::{Error, Result};

/// Calibration figures of one device.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseProfile {
    pub name: String,
    pub two_qubit_error: f64,
    pub sx_error: f64,
    pub readout_error: f64,
    pub t1_seconds: f64,
    pub t2_seconds: f64,
    pub gate_time_seconds: f64,
}

pub const CATALOG_FIELDS: [&str; 7] = [
    "name",
    "two_qubit_error",
    "sx_error",
    "readout_error",
    "t1_seconds",
    "t2_seconds",
    "gate_time_seconds",
];

/// Shipped catalog of IBM device calibrations.
pub const DEFAULT_CATALOG: &str = include_str!("../../data/ibm_noise_profiles.csv");

impl NoiseProfile {
    /// Zero error rates and infinite coherence times: every channel is the
    /// identity.
    pub fn noiseless() -> Self {
        Self {
            name: "noiseless".into(),
            two_qubit_error: 0.0,
            sx_error: 0.0,
            readout_error: 0.0,
            t1_seconds: f64::INFINITY,
            t2_seconds: f64::INFINITY,
            gate_time_seconds: 1e-8,
        }
    }

    /// Returns the offending field name and reason.
    pub fn check(&self) -> std::result::Result<(), (&'static str, String)> {
        for (field, p) in [
            ("two_qubit_error", self.two_qubit_error),
            ("sx_error", self.sx_error),
            ("readout_error", self.readout_error),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err((field, format!("{p} is not a probability in [0, 1]")));
            }
        }
        for (field, t) in [
            ("t1_seconds", self.t1_seconds),
            ("t2_seconds", self.t2_seconds),
            ("gate_time_seconds", self.gate_time_seconds),
        ] {
            if t.is_nan() || t <= 0.0 {
                return Err((field, format!("{t} is not a positive time")));
            }
        }
        if !self.gate_time_seconds.is_finite() {
            return Err(("gate_time_seconds", "gate time must be finite".into()));
        }
        if self.t2_seconds > 2.0 * self.t1_seconds {
            return Err((
                "t2_seconds",
                format!(
                    "T2 = {} exceeds 2·T1 = {}; no physical pure-dephasing rate",
                    self.t2_seconds,
                    2.0 * self.t1_seconds
                ),
            ));
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.check().map_err(|(field, message)| Error::Catalog {
            row: 0,
            field: field.into(),
            message: format!("profile `{}`: {message}", self.name),
        })
    }

    /// `γ = 1 − exp(−t_gate / T1)`.
    pub fn amplitude_damping_gamma(&self) -> f64 {
        -(-self.gate_time_seconds / self.t1_seconds).exp_m1()
    }

    /// Pure-dephasing rate `1/Tφ = 1/T2 − 1/(2·T1)`, clamped at zero.
    pub fn dephasing_rate(&self) -> f64 {
        let rate = 1.0 / self.t2_seconds - 0.5 / self.t1_seconds;
        if rate < 0.0 {
            // Only reachable through rounding once `check` has passed.
            warn!(
                "profile `{}`: negative pure-dephasing rate {rate:e} clamped to 0",
                self.name
            );
            0.0
        } else {
            rate
        }
    }

    /// `λ = 1 − exp(−t_gate / Tφ)`.
    pub fn phase_damping_lambda(&self) -> f64 {
        -(-self.gate_time_seconds * self.dephasing_rate()).exp_m1()
    }
}

/// Amplitude- and phase-damping channels for one gate duration.
pub fn damping_channels(profile: &NoiseProfile) -> Result<(KrausChannel, KrausChannel)> {
    profile.validate()?;
    Ok((
        KrausChannel::amplitude_damping(profile.amplitude_damping_gamma())?,
        KrausChannel::phase_damping(profile.phase_damping_lambda())?,
    ))
}

/// Parses a catalog: comma-separated with a header naming exactly
/// [`CATALOG_FIELDS`], `#` comment lines allowed. Errors name the 1-based
/// file line and the field.
pub fn parse_catalog(text: &str) -> Result<IndexMap<String, NoiseProfile>> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| catalog_err(1, "header", e.to_string()))?
        .clone();
    let mut catalog = IndexMap::new();
    if headers.is_empty() || (headers.len() == 1 && headers[0].is_empty()) {
        warn!("noise catalog is empty");
        return Ok(catalog);
    }
    let header_line = headers.position().map_or(1, |p| p.line() as usize);
    let mut columns = [0usize; 7];
    for (slot, field) in columns.iter_mut().zip(CATALOG_FIELDS) {
        *slot = headers
            .iter()
            .position(|h| h == field)
            .ok_or_else(|| catalog_err(header_line, field, "column missing from header".into()))?;
    }
    if headers.len() != CATALOG_FIELDS.len() {
        let extra = headers
            .iter()
            .find(|h| !CATALOG_FIELDS.contains(h))
            .unwrap_or("?")
            .to_string();
        return Err(catalog_err(header_line, &extra, "unexpected column".into()));
    }

    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            catalog_err(line, "record", e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.len() != CATALOG_FIELDS.len() {
            return Err(catalog_err(
                line,
                "record",
                format!("expected {} fields, found {}", CATALOG_FIELDS.len(), record.len()),
            ));
        }
        let text_at = |k: usize| &record[columns[k]];
        let number = |k: usize| -> Result<f64> {
            text_at(k)
                .parse::<f64>()
                .map_err(|_| catalog_err(line, CATALOG_FIELDS[k], format!("`{}` is not a number", text_at(k))))
        };
        let name = text_at(0).to_string();
        if name.is_empty() {
            return Err(catalog_err(line, "name", "empty profile name".into()));
        }
        let profile = NoiseProfile {
            name: name.clone(),
            two_qubit_error: number(1)?,
            sx_error: number(2)?,
            readout_error: number(3)?,
            t1_seconds: number(4)?,
            t2_seconds: number(5)?,
            gate_time_seconds: number(6)?,
        };
        profile
            .check()
            .map_err(|(field, message)| catalog_err(line, field, message))?;
        if catalog.insert(name.clone(), profile).is_some() {
            return Err(catalog_err(line, "name", format!("duplicate profile `{name}`")));
        }
    }
    if catalog.is_empty() {
        warn!("noise catalog has a header but no profiles");
    }
    Ok(catalog)
}

fn catalog_err(row: usize, field: &str, message: String) -> Error {
    Error::Catalog {
        row,
        field: field.into(),
        message,
    }
}

pub fn load_profiles(path: impl AsRef<Path>) -> Result<IndexMap<String, NoiseProfile>> {
    parse_catalog(&std::fs::read_to_string(path)?)
}

pub fn default_profiles() -> IndexMap<String, NoiseProfile> {
    parse_catalog(DEFAULT_CATALOG).expect("shipped noise catalog is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_catalog_rows() {
        let cat = default_profiles();
        assert_eq!(cat.len(), 7);
        let names: Vec<&str> = cat.keys().map(String::as_str).collect();
        assert_eq!(
            names,
            [
                "IBM-Fez",
                "IBM-Marrakesh",
                "IBM-Torino",
                "IBM-Yonsei",
                "IBM-Brisbane",
                "IBM-Brussels",
                "IBM-Strasbourg"
            ]
        );
        let fez = &cat["IBM-Fez"];
        assert_eq!(fez.two_qubit_error, 2.792e-3);
        assert_eq!(fez.sx_error, 2.703e-4);
        assert_eq!(fez.readout_error, 1.645e-2);
        assert_eq!(fez.t1_seconds, 1.181e-4);
        assert_eq!(fez.t2_seconds, 9.141e-5);
        assert_eq!(fez.gate_time_seconds, 6.8e-8);
        assert_eq!(cat["IBM-Torino"].two_qubit_error, 6.250e-3);
    }

    #[test]
    fn fez_damping_parameters() {
        let fez = &default_profiles()["IBM-Fez"];
        let gamma = 1.0 - f64::exp(-6.8e-8 / 1.181e-4);
        assert!((fez.amplitude_damping_gamma() - gamma).abs() < 1e-15);
        let rate = 1.0 / 9.141e-5 - 1.0 / (2.0 * 1.181e-4);
        let lambda = 1.0 - f64::exp(-6.8e-8 * rate);
        assert!((fez.phase_damping_lambda() - lambda).abs() < 1e-15);
    }

    #[test]
    fn infinite_coherence_gives_identity_damping() {
        let (amp, phase) = damping_channels(&NoiseProfile::noiseless()).unwrap();
        assert!(amp.is_identity());
        assert!(phase.is_identity());
    }

    #[test]
    fn empty_inputs_give_empty_catalog() {
        assert!(parse_catalog("").unwrap().is_empty());
        assert!(parse_catalog("# only a comment\n").unwrap().is_empty());
        assert!(parse_catalog(&CATALOG_FIELDS.join(",")).unwrap().is_empty());
    }

    fn err_of(text: &str) -> (usize, String) {
        match parse_catalog(text) {
            Err(Error::Catalog { row, field, .. }) => (row, field),
            other => panic!("expected catalog error, got {other:?}"),
        }
    }

    #[test]
    fn errors_name_row_and_field() {
        let h = CATALOG_FIELDS.join(",");
        assert_eq!(err_of(&format!("{h}\nA,0.1,0.1,x,1,1,1\n")), (2, "readout_error".into()));
        assert_eq!(err_of(&format!("{h}\nA,0.1,1.5,0.1,1,1,1\n")), (2, "sx_error".into()));
        assert_eq!(
            err_of(&format!("{h}\nA,0.1,0.1,0.1,1,1,1\nB,0.1,0.1,0.1,1e-4,3e-4,1e-8\n")),
            (3, "t2_seconds".into())
        );
        assert_eq!(err_of(&format!("{h}\nA,0.1,0.1,0.1,1,-1,1\n")), (2, "t2_seconds".into()));
        assert_eq!(err_of(&format!("{h}\nA,0.1,0.1\n")), (2, "record".into()));
        assert_eq!(err_of("name,sx_error\n"), (1, "two_qubit_error".into()));
        assert_eq!(
            err_of(&format!("{h}\nA,0,0,0,1,1,1\nA,0,0,0,1,1,1\n")),
            (3, "name".into())
        );
    }
}
