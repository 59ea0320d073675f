fn main() {
    std::process::exit(poincare::cli::run(std::env::args().collect()));
}
