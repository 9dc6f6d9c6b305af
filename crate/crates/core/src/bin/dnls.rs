fn main() {
    std::process::exit(dnls_core::cli::run(std::env::args_os()));
}
