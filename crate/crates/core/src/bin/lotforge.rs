fn main() {
    std::process::exit(lotforge::cli::cli_main(std::env::args_os()));
}
