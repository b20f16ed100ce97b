fn main() {
    std::process::exit(cbpv_core::cli::run(std::env::args_os()));
}
