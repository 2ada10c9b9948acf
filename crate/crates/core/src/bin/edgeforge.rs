fn main() {
    std::process::exit(edgeforge::cli::cli_main(std::env::args_os()));
}
