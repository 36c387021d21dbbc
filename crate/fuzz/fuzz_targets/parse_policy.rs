#![no_main]

use libfuzzer_sys::fuzz_target;
use qubit_track_cli::parse::{parse_policy, PolicySpec};

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(spec) = parse_policy(text) {
            let again: PolicySpec = spec.to_string().parse().expect("display round-trips");
            assert_eq!(again, spec);
        }
    }
});
