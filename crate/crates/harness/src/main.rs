fn main() {
    std::process::exit(vmp_harness::cli::main_with_args(std::env::args_os()));
}
