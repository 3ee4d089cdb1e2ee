fn main() {
    std::process::exit(contrace_cli::run(std::env::args_os()));
}
