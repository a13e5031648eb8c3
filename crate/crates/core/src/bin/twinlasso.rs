fn main() {
    std::process::exit(twinlasso::cli::run(std::env::args_os()));
}
