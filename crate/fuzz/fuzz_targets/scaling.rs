#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let _ = modelforge::formats::scaling::parse_scaling_table(text, "fuzz", modelforge::anthro::AlgorithmId::Custom);
});
