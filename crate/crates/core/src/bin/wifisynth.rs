fn main() {
    std::process::exit(wifisynth::cli::dispatch(std::env::args_os()));
}
