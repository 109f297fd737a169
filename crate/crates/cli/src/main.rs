fn main() {
    std::process::exit(dirikit_cli::run(std::env::args_os()));
}
