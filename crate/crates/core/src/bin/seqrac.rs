fn main() {
    std::process::exit(seqrac::cli::main_with_args(std::env::args_os()));
}
