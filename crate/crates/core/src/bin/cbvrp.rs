fn main() {
    std::process::exit(cbvrp::cli::run(std::env::args_os()));
}
