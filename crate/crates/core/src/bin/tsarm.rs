fn main() {
    std::process::exit(tsarm::cli::run(std::env::args_os()));
}
