fn main() {
    std::process::exit(pathclass::cli::run(std::env::args_os()));
}
