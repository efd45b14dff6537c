fn main() {
    std::process::exit(thurston_ergopt::cli::main(std::env::args_os()));
}
