fn main() {
    std::process::exit(emdecay_cli::run(std::env::args_os()));
}
