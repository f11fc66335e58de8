fn main() {
    std::process::exit(qwk::cli::main_with_args(std::env::args_os()));
}
