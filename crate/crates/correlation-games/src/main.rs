fn main() {
    std::process::exit(correlation_games::cli::run(std::env::args_os()));
}
