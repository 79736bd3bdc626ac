fn main() {
    std::process::exit(renyidim::cli::run());
}
