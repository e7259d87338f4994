fn main() {
    std::process::exit(infotypes_cli::run_cli(std::env::args_os()));
}
