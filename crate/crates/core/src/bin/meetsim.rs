fn main() {
    std::process::exit(meetsim::cli::main_with_args(std::env::args_os()));
}
