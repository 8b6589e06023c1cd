fn main() {
    std::process::exit(charpoly::cli::run(std::env::args_os()));
}
