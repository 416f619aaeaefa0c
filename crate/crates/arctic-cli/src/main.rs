fn main() {
    std::process::exit(arctic_cli::run(std::env::args_os()));
}
