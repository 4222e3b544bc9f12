fn main() {
    std::process::exit(specsym_cli::run());
}
