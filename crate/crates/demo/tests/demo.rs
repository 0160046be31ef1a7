use hqnn_demo::{noise_by_depth, profile_list, response_curve, smiles_report, MAX_DEMO_QUBITS};
use serde_json::Value;

fn floats(v: &Value) -> Vec<f64> {
    v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

#[test]
fn shallow_curve_matches_closed_form() {
    // Without ansatz blocks each qubit sits at Ry(arctan x + π/2)|0⟩, so
    // ⟨Z⟩ = −x/√(1+x²).
    let n = 3;
    let c = response_curve(n, 0, 1, "IBM-Fez", 41, 4.0).unwrap();
    for (x, e) in floats(&c["x"]).iter().zip(floats(&c["noiseless"])) {
        let want = -(n as f64) * x / (1.0 + x * x).sqrt();
        assert!((e - want).abs() < 1e-12, "x={x}: {e} vs {want}");
    }
}

#[test]
fn noisy_curve_is_contracted_but_close() {
    let c = response_curve(4, 2, 7, "IBM-Torino", 25, 3.0).unwrap();
    let (clean, noisy) = (floats(&c["noiseless"]), floats(&c["noisy"]));
    assert_eq!((clean.len(), noisy.len()), (25, 25));
    let gap = c["max_gap"].as_f64().unwrap();
    assert!(gap > 1e-4 && gap < 0.5, "{gap}");
    assert!(noisy.iter().all(|e| e.abs() <= 4.0));
    assert_eq!(c["params"].as_array().unwrap().len(), 8);
}

#[test]
fn noise_error_grows_with_depth() {
    let v = noise_by_depth(3, 6, 2, 16).unwrap();
    let profiles = v["profiles"].as_array().unwrap();
    assert_eq!(profiles.len(), profile_list().as_array().unwrap().len());
    for p in profiles {
        let g = floats(&p["mean_abs_error"]);
        assert_eq!(g.len(), 7);
        assert!(g[0] > 0.0 && g[6] > g[0], "{}: {g:?}", p["name"]);
    }
}

#[test]
fn demo_limits_are_errors() {
    assert!(response_curve(MAX_DEMO_QUBITS + 1, 1, 0, "IBM-Fez", 10, 1.0).is_err());
    assert!(response_curve(2, 1, 0, "IBM-Nowhere", 10, 1.0).is_err());
    assert!(response_curve(2, 1, 0, "IBM-Fez", 1, 1.0).is_err());
    assert!(noise_by_depth(2, 2, 0, 0).is_err());
}

#[test]
fn smiles_report_describes_molecule() {
    let r = smiles_report("CCc1ccccc1", 2, 256).unwrap();
    assert_eq!(r["formula"], "C8H10");
    assert_eq!(r["scaffold_size"], 6);
    assert_eq!(r["atoms"].as_array().unwrap().len(), 8);
    assert_eq!(r["popcount"].as_u64().unwrap() as usize, r["on_bits"].as_array().unwrap().len());
    assert_eq!(smiles_report("OCC", 2, 256).unwrap()["formula"], "C2H6O");
    assert_eq!(smiles_report("N", 2, 256).unwrap()["formula"], "H3N");
    assert_eq!(smiles_report("[NH4+]", 2, 256).unwrap()["formula"], "H4N");
}

#[test]
fn smiles_errors_carry_offsets() {
    let r = smiles_report("CC(C", 2, 256).unwrap();
    assert!(r["error"].is_string());
    assert_eq!(r["offset"], 2);
    assert!(smiles_report("CCO", 2, 100).is_err());
}
