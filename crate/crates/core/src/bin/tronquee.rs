fn main() {
    std::process::exit(tronquee::cli::run(std::env::args_os()));
}
