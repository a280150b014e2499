fn main() {
    std::process::exit(thermoscope::cli::main_with_args(std::env::args_os()));
}
