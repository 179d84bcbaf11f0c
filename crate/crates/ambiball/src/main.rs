fn main() {
    std::process::exit(ambiball::cli::run_from_env());
}
