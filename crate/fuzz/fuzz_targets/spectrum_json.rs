#![no_main]
use kaleido::cli::System;
use kaleido::MassSpectrum;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    let Ok(spectrum) = MassSpectrum::from_json(data) else {
        return;
    };
    assert!(spectrum.masses().iter().all(|m| m.is_finite() && *m > 0.0));
    let again = MassSpectrum::from_json(&spectrum.to_json()).unwrap();
    assert_eq!(again, spectrum);
    // Keep matrices and closure small.
    if spectrum.len() <= 6 {
        let _ = System::build(spectrum, 2000);
    }
});
