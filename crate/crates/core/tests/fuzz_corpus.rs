//! Replays the checked-in fuzz corpus through the parser invariants that the
//! fuzz targets assert, so the seeds stay meaningful on stable toolchains.

use std::fs;
use std::path::PathBuf;

use nerve_orbits::cli::{parse_float_list, parse_value, Scenario, Seeds};

fn seeds(target: &str) -> Vec<(String, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fuzz/corpus").join(target);
    let mut out: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let path = e.unwrap().path();
            let name = path.file_name().unwrap().to_string_lossy().into_owned();
            (name, fs::read_to_string(&path).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

#[test]
fn config_seeds_round_trip() {
    let mut parsed = 0;
    for (name, text) in seeds("parse_config") {
        if let Ok(sc) = Scenario::parse(&text) {
            assert_eq!(Scenario::parse(&sc.to_config()).unwrap(), sc, "{name}");
            parsed += 1;
        }
    }
    assert!(parsed >= 5, "most config seeds should be valid");
}

#[test]
fn value_seeds_parse() {
    for (name, text) in seeds("parse_value") {
        assert!(parse_value(&text).is_ok(), "{name}: {text}");
    }
}

#[test]
fn float_list_seeds_are_finite() {
    for (name, text) in seeds("parse_float_list") {
        if let Ok(values) = parse_float_list(&text) {
            assert!(values.iter().all(|v| v.is_finite()), "{name}");
        }
    }
    assert!(parse_float_list("20,80,320").is_ok());
}

#[test]
fn seed_grid_seeds_are_positive() {
    for (name, text) in seeds("parse_seeds") {
        if let Ok(s) = text.parse::<Seeds>() {
            assert!(s.angular > 0 && s.radial > 0 && s.phases > 0, "{name}");
        }
    }
}
