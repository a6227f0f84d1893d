fn main() {
    std::process::exit(minisol_iv::cli::main_with_args(std::env::args_os()));
}
