fn main() {
    std::process::exit(ccdp::cli::main(std::env::args_os()));
}
