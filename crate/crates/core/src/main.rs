fn main() {
    std::process::exit(flood_depth::cli::run(std::env::args_os()));
}
