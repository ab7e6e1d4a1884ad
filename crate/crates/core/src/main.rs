fn main() {
    std::process::exit(dishrec::cli::run(std::env::args_os()));
}
