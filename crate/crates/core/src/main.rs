fn main() {
    std::process::exit(nibble::cli::run_command(std::env::args_os()));
}
