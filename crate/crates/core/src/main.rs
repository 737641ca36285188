fn main() {
    std::process::exit(hypercount::cli::run(std::env::args_os()));
}
