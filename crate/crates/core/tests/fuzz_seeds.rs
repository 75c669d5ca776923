//! Replays the checked-in fuzz corpora through the same checks as the
//! fuzz targets, so the seeds stay meaningful on stable toolchains.

use std::fs;
use std::path::PathBuf;

use kaleido::cli::{parse_family, parse_real_list, System};
use kaleido::MassSpectrum;

fn seeds(target: &str) -> Vec<String> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fuzz/corpus")
        .join(target);
    let mut paths: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| e.unwrap().path())
        .collect();
    paths.sort();
    assert!(!paths.is_empty());
    paths
        .iter()
        .map(|p| fs::read_to_string(p).unwrap())
        .collect()
}

#[test]
fn spectrum_json_seeds() {
    let mut accepted = 0;
    for text in seeds("spectrum_json") {
        let Ok(spectrum) = MassSpectrum::from_json(&text) else {
            continue;
        };
        accepted += 1;
        assert_eq!(
            MassSpectrum::from_json(&spectrum.to_json()).unwrap(),
            spectrum
        );
        if spectrum.len() <= 6 {
            let _ = System::build(spectrum, 2000);
        }
    }
    assert!(accepted >= 3);
}

#[test]
fn real_list_seeds() {
    for text in seeds("real_list") {
        if let Ok(values) = parse_real_list(&text) {
            assert!(!values.is_empty() && values.iter().all(|v| v.is_finite()));
        }
    }
}

#[test]
fn family_name_seeds() {
    let parsed = seeds("family_name")
        .iter()
        .filter(|t| parse_family(t).is_ok())
        .count();
    assert_eq!(parsed, 2);
}
