fn main() {
    std::process::exit(abmon::cli::cli_main());
}
