fn main() {
    std::process::exit(rmt::cli::main_with_args(std::env::args_os()));
}
