fn main() {
    std::process::exit(gaitmatrix_cli::run(std::env::args_os()));
}
