fn main() {
    std::process::exit(toda_tau::cli::main_with_args(std::env::args_os()));
}
