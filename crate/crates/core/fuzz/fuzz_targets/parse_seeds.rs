#![no_main]

use libfuzzer_sys::fuzz_target;
use nerve_orbits::cli::Seeds;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(seeds) = text.parse::<Seeds>() {
            assert!(seeds.angular > 0 && seeds.radial > 0 && seeds.phases > 0);
        }
    }
});
