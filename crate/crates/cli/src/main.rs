fn main() {
    std::process::exit(nclab_cli::run(std::env::args_os()));
}
