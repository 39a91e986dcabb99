fn main() {
    std::process::exit(gridforge_cli::run(std::env::args_os()));
}
