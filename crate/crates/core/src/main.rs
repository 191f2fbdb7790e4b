fn main() {
    std::process::exit(haltkit::cli::main_with(std::env::args_os()));
}
