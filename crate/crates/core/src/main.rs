fn main() {
    std::process::exit(zerosum::cli::main_entry(std::env::args_os()));
}
