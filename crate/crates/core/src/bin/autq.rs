fn main() {
    std::process::exit(autq::cli::run(std::env::args_os()));
}
