fn main() {
    std::process::exit(qubit_track_cli::run(std::env::args_os()));
}
