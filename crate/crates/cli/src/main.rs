fn main() {
    std::process::exit(tumorfb_cli::run(std::env::args_os()));
}
