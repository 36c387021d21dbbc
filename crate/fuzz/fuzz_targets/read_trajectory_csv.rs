#![no_main]

use libfuzzer_sys::fuzz_target;
use qubit_track_cli::output::read_trajectory_csv;

fuzz_target!(|data: &[u8]| {
    let _ = read_trajectory_csv(data);
});
