fn main() {
    std::process::exit(siegel::cli::run(std::env::args_os()));
}
