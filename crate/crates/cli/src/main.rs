fn main() {
    std::process::exit(spss_cli::run(std::env::args_os()));
}
