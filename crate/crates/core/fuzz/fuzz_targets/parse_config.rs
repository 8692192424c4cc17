#![no_main]

use libfuzzer_sys::fuzz_target;
use nerve_orbits::cli::Scenario;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    // anything that parses must survive a write and re-read unchanged
    if let Ok(sc) = Scenario::parse(text) {
        let again = Scenario::parse(&sc.to_config()).expect("written config parses");
        assert_eq!(again, sc);
    }
});
