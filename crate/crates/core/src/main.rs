fn main() {
    std::process::exit(speccam::cli::main_with(std::env::args_os()));
}
