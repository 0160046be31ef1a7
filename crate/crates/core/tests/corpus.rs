use std::io::Write;

use hqnn_core::chem::{parse_smiles, ParseErrorKind};
use hqnn_core::data::{relative_performance_csv, Dataset, RelativePerformance, RelativeRow};
use hqnn_core::Error;

fn lines(name: &str) -> Vec<String> {
    let path = format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_owned)
        .collect()
}

#[test]
fn valid_corpus_parses() {
    let valid = lines("smiles_valid.txt");
    assert!(valid.len() >= 50);
    for s in &valid {
        let m = parse_smiles(s).unwrap_or_else(|e| panic!("{s}: {e}"));
        assert!(!m.is_empty());
    }
}

#[test]
fn malformed_corpus_is_rejected() {
    let invalid = lines("smiles_invalid.txt");
    assert!(invalid.len() >= 20);
    for s in &invalid {
        match parse_smiles(s) {
            Ok(m) => panic!("{s} parsed to {} atoms", m.atoms.len()),
            Err(e) => assert!(e.offset <= s.len(), "{s}: offset {}", e.offset),
        }
    }
}

#[test]
fn charged_amines() {
    let m = parse_smiles("OCC[N+](C)(C)C").unwrap();
    assert_eq!(m.atoms[3].charge, 1);
    assert_eq!(m.atoms[3].hydrogens, 0);
    let m = parse_smiles("[O-]C(=O)NCCO").unwrap();
    assert_eq!(m.atoms[0].charge, -1);
    assert_eq!(m.atoms[3].hydrogens, 1);
}

#[test]
fn valence_error_points_at_atom() {
    let e = parse_smiles("CCN(C)(C)(C)(C)C").unwrap_err();
    assert_eq!(e.offset, 2);
    assert!(matches!(e.kind, ParseErrorKind::ValenceOverflow { ref element, valence: 6 } if element == "N"), "{e}");
}

#[test]
fn load_reports_target_range() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "id,smiles,y\na1,NCCO,9.5\na2,CN(C)CCO,-2.86\na3,NCCN,11.94\na4,C1CCNCC1,11.1").unwrap();
    let d = Dataset::load_csv(f.path()).unwrap();
    let s = d.summary().unwrap();
    assert_eq!((s.count, s.y_min, s.y_max), (4, -2.86, 11.94));
}

#[test]
fn missing_file_is_io_error() {
    assert!(matches!(Dataset::load_csv("/nonexistent/rows.csv"), Err(Error::Io(_))));
}

#[test]
fn table_layout() {
    let entry = |label: &str, r2: f64, m: f64| {
        (
            label.to_string(),
            RelativePerformance {
                r2_pct: r2,
                mae_pct: m,
            },
        )
    };
    let rows = [
        RelativeRow {
            property: "Basicity (pKa)".into(),
            model: "HQMLP".into(),
            entries: vec![entry("HQSc (4Q)", 0.0661, 6.193), entry("HQFi (4Q)", 0.3303, 7.5547)],
        },
        RelativeRow {
            property: "Viscosity".into(),
            model: "HQMLP".into(),
            entries: vec![entry("HQSc (9Q)", 0.0, 0.0)],
        },
    ];
    assert!(relative_performance_csv(&rows).is_err());
    let text = relative_performance_csv(&rows[..1]).unwrap();
    assert_eq!(
        text.lines().next().unwrap(),
        "property,model,HQSc (4Q) R2,HQSc (4Q) MAE,HQFi (4Q) R2,HQFi (4Q) MAE"
    );
    assert_eq!(text.lines().nth(1).unwrap(), "Basicity (pKa),HQMLP,0.07,6.19,0.33,7.55");
}
