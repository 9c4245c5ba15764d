fn main() {
    std::process::exit(ssdps::cli::run(std::env::args_os()));
}
