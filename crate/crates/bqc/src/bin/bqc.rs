fn main() {
    std::process::exit(bqc::cli::main_from_args());
}
