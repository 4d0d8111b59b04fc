fn main() {
    std::process::exit(guided_ig::cli::run(std::env::args_os()));
}
