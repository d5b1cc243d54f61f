fn main() {
    std::process::exit(phasegraph::cli::main_with_args(std::env::args_os()));
}
