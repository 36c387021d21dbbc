#![no_main]

use libfuzzer_sys::fuzz_target;
use qubit_track_cli::manifest::RunManifest;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(m) = RunManifest::from_json(text) {
            let again = RunManifest::from_json(&m.to_json()).expect("serialized manifest parses");
            assert_eq!(again.argv, m.argv);
        }
    }
});
