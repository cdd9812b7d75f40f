fn main() {
    std::process::exit(submax::bench::cli::main_with(std::env::args_os()));
}
