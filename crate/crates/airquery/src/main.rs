fn main() {
    std::process::exit(airquery::cli::run());
}
