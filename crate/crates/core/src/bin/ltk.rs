fn main() {
    std::process::exit(ltk::cli::run(std::env::args_os()));
}
