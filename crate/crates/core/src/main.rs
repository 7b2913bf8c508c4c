fn main() {
    std::process::exit(lipcheck::cli::run(std::env::args_os()));
}
