//! Browser demo for the hybrid regressor: noiseless vs noisy VQR response
//! curves, hardware noise sensitivity by circuit depth, and SMILES analysis.
//!
//! Every exported function returns a JSON string; the page parses it and
//! draws with a plain canvas.

use hqnn_core::chem::{circular_fingerprint, murcko_atoms, parse_smiles, scaffold_key, Molecule};
use hqnn_core::noise::{default_profiles, NoiseModel, NoiseProfile};
use hqnn_core::quantum::CircuitTemplate;
use hqnn_core::rng;
use hqnn_core::vqr::{vqr_forward, Backend, VqrParams};
use hqnn_core::{Error, Result};
use rand::Rng;
use serde::Serialize;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Density-matrix cost grows as 4ⁿ; keep the page responsive.
pub const MAX_DEMO_QUBITS: usize = 6;
pub const MAX_POINTS: usize = 401;
pub const MAX_DEMO_DEPTH: usize = 12;

fn to_js(r: Result<Value>) -> std::result::Result<String, JsValue> {
    r.map(|v| v.to_string()).map_err(|e| JsValue::from_str(&e.to_string()))
}

fn profile(name: &str) -> Result<NoiseProfile> {
    default_profiles()
        .get(name)
        .cloned()
        .ok_or_else(|| Error::Config(format!("unknown noise profile `{name}`")))
}

fn demo_template(n_qubits: usize, depth: usize) -> Result<CircuitTemplate> {
    if n_qubits > MAX_DEMO_QUBITS || depth > MAX_DEMO_DEPTH {
        return Err(Error::Config(format!(
            "the demo is limited to {MAX_DEMO_QUBITS} qubits and depth {MAX_DEMO_DEPTH}"
        )));
    }
    CircuitTemplate::new(n_qubits, depth)
}

pub fn profile_list() -> Value {
    let rows: Vec<Value> = default_profiles()
        .values()
        .map(|p| {
            json!({
                "name": p.name,
                "two_qubit_error": p.two_qubit_error,
                "readout_error": p.readout_error,
                "gamma": p.amplitude_damping_gamma(),
                "lambda": p.phase_damping_lambda(),
            })
        })
        .collect();
    Value::Array(rows)
}

/// Expectation ⟨ΣZ⟩ for embeddings `(x, …, x)` with `x` swept over
/// `[-range, range]`, with and without the named profile.
pub fn response_curve(
    n_qubits: usize,
    depth: usize,
    seed: u64,
    profile_name: &str,
    points: usize,
    range: f64,
) -> Result<Value> {
    let template = demo_template(n_qubits, depth)?;
    if !(2..=MAX_POINTS).contains(&points) || !(range.is_finite() && range > 0.0) {
        return Err(Error::Config(format!("need 2..={MAX_POINTS} points and a positive range")));
    }
    let params = VqrParams::random(&template, &mut rng::substream(seed, rng::INIT));
    let noisy = Backend::noisy(NoiseModel::new(&profile(profile_name)?)?);
    let (mut xs, mut exact, mut with_noise) = (Vec::new(), Vec::new(), Vec::new());
    for i in 0..points {
        let x = -range + 2.0 * range * i as f64 / (points - 1) as f64;
        let e = vec![x; n_qubits];
        xs.push(x);
        exact.push(vqr_forward(&e, &params, &template, &Backend::Exact)?);
        with_noise.push(vqr_forward(&e, &params, &template, &noisy)?);
    }
    let gap = exact
        .iter()
        .zip(&with_noise)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(json!({
        "n_qubits": n_qubits,
        "depth": depth,
        "profile": profile_name,
        "params": params.0,
        "x": xs,
        "noiseless": exact,
        "noisy": with_noise,
        "max_gap": gap,
    }))
}

/// Mean |⟨ΣZ⟩_noisy − ⟨ΣZ⟩_exact| over random inputs and parameters, for
/// every catalog profile and each depth `0..=max_depth`.
pub fn noise_by_depth(n_qubits: usize, max_depth: usize, seed: u64, samples: usize) -> Result<Value> {
    demo_template(n_qubits, max_depth)?;
    if samples == 0 {
        return Err(Error::Config("need at least one sample".into()));
    }
    let profiles = default_profiles();
    let models = profiles
        .values()
        .map(|p| NoiseModel::new(p).map(Backend::noisy))
        .collect::<Result<Vec<_>>>()?;
    let mut gaps = vec![vec![0.0; max_depth + 1]; models.len()];
    for depth in 0..=max_depth {
        let template = CircuitTemplate::new(n_qubits, depth)?;
        let mut r = rng::indexed(seed, &[depth as u64]);
        for _ in 0..samples {
            let e: Vec<f64> = (0..n_qubits).map(|_| r.gen_range(-3.0..3.0)).collect();
            let params = VqrParams::random(&template, &mut r);
            let exact = vqr_forward(&e, &params, &template, &Backend::Exact)?;
            for (g, backend) in gaps.iter_mut().zip(&models) {
                g[depth] += (vqr_forward(&e, &params, &template, backend)? - exact).abs() / samples as f64;
            }
        }
    }
    let series: Vec<Value> = profiles
        .keys()
        .zip(gaps)
        .map(|(name, gap)| json!({ "name": name, "mean_abs_error": gap }))
        .collect();
    Ok(json!({
        "n_qubits": n_qubits,
        "depths": (0..=max_depth).collect::<Vec<_>>(),
        "profiles": series,
    }))
}

#[derive(Serialize)]
struct AtomView<'a> {
    element: &'a str,
    aromatic: bool,
    charge: i8,
    hydrogens: u8,
    in_ring: bool,
    in_scaffold: bool,
}

/// Hill-order formula (C, H, then alphabetical; alphabetical without C).
pub fn formula(mol: &Molecule) -> String {
    let mut counts = std::collections::BTreeMap::<&str, usize>::new();
    let mut h = 0;
    for a in &mol.atoms {
        *counts.entry(a.element.as_str()).or_default() += 1;
        h += usize::from(a.hydrogens);
    }
    if h > 0 {
        *counts.entry("H").or_default() += h;
    }
    let lead: &[&str] = if counts.contains_key("C") { &["C", "H"] } else { &[] };
    let order = lead
        .iter()
        .copied()
        .filter(|e| counts.contains_key(e))
        .chain(counts.keys().copied().filter(|e| !lead.contains(e)));
    order
        .map(|e| match counts[e] {
            1 => e.to_string(),
            n => format!("{e}{n}"),
        })
        .collect()
}

/// Parse result, circular fingerprint and scaffold of one SMILES string.
/// Parse failures come back as `{ "error", "offset" }` so the page can
/// point at the offending byte.
pub fn smiles_report(smiles: &str, radius: usize, nbits: usize) -> Result<Value> {
    let mol = match parse_smiles(smiles) {
        Ok(m) => m,
        Err(e) => return Ok(json!({ "error": e.kind.to_string(), "offset": e.offset })),
    };
    let fp = circular_fingerprint(&mol, radius, nbits)?;
    let rings = mol.ring_atoms();
    let mut scaffold = vec![false; mol.atoms.len()];
    for i in murcko_atoms(&mol) {
        scaffold[i] = true;
    }
    let atoms: Vec<AtomView> = mol
        .atoms
        .iter()
        .enumerate()
        .map(|(i, a)| AtomView {
            element: &a.element,
            aromatic: a.aromatic,
            charge: a.charge,
            hydrogens: a.hydrogens,
            in_ring: rings[i],
            in_scaffold: scaffold[i],
        })
        .collect();
    let bonds: Vec<Value> = mol
        .bonds
        .iter()
        .map(|b| json!([b.a, b.b, format!("{:?}", b.order).to_lowercase()]))
        .collect();
    Ok(json!({
        "formula": formula(&mol),
        "atoms": atoms,
        "bonds": bonds,
        // u64 does not survive a JS number
        "scaffold_key": format!("{:016x}", scaffold_key(&mol)),
        "scaffold_size": scaffold.iter().filter(|&&s| s).count(),
        "nbits": nbits,
        "radius": radius,
        "on_bits": fp.on_bits(),
        "popcount": fp.popcount(),
    }))
}

#[wasm_bindgen(js_name = profiles)]
pub fn js_profiles() -> String {
    profile_list().to_string()
}

#[wasm_bindgen(js_name = responseCurve)]
pub fn js_response_curve(
    n_qubits: usize,
    depth: usize,
    seed: u32,
    profile: &str,
    points: usize,
    range: f64,
) -> std::result::Result<String, JsValue> {
    to_js(response_curve(n_qubits, depth, u64::from(seed), profile, points, range))
}

#[wasm_bindgen(js_name = noiseByDepth)]
pub fn js_noise_by_depth(
    n_qubits: usize,
    max_depth: usize,
    seed: u32,
    samples: usize,
) -> std::result::Result<String, JsValue> {
    to_js(noise_by_depth(n_qubits, max_depth, u64::from(seed), samples))
}

#[wasm_bindgen(js_name = analyzeSmiles)]
pub fn js_analyze_smiles(smiles: &str, radius: usize, nbits: usize) -> std::result::Result<String, JsValue> {
    to_js(smiles_report(smiles, radius, nbits))
}
