fn main() {
    std::process::exit(bonnesen_cli::run(std::env::args_os()));
}
