#![no_main]

use libfuzzer_sys::fuzz_target;
use qubit_track_cli::output::read_entropy_csv;

fuzz_target!(|data: &[u8]| {
    let _ = read_entropy_csv(data);
});
