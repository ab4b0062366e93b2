fn main() {
    std::process::exit(pmetric::cli::main_with_args(std::env::args_os()));
}
