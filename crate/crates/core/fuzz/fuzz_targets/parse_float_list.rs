#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(values) = nerve_orbits::cli::parse_float_list(text) {
            assert!(values.iter().all(|v| v.is_finite()));
        }
    }
});
