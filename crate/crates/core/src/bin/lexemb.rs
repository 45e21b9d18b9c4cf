fn main() {
    std::process::exit(lexemb::cli::run(std::env::args_os()));
}
