fn main() {
    std::process::exit(lorasic::cli::main_with_args(std::env::args_os()));
}
