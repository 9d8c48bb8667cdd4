fn main() {
    std::process::exit(l1lab::cli::run(std::env::args_os()));
}
