fn main() {
    std::process::exit(qrsim::cli::main_with_args(std::env::args_os()));
}
