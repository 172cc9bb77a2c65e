fn main() {
    std::process::exit(hexsum_cli::main_with(std::env::args_os()));
}
