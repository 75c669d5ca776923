#![no_main]
use kaleido::cli::parse_family;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    let _ = parse_family(data);
});
