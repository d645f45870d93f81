fn main() {
    let argv: Vec<String> = std::env::args().collect();
    std::process::exit(lindblad_certify::cli::run(&argv));
}
