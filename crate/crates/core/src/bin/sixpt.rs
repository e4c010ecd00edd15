fn main() {
    std::process::exit(sixpt::cli::run(std::env::args_os()));
}
