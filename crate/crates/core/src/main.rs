fn main() {
    std::process::exit(passinet::cli::run());
}
