fn main() {
    std::process::exit(cv_oodg::cli::run(std::env::args_os()));
}
