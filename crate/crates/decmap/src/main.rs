fn main() {
    std::process::exit(decmap::cli::run());
}
