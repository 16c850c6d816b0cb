fn main() {
    std::process::exit(geoweave::cli::run(std::env::args_os()));
}
