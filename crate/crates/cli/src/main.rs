fn main() {
    std::process::exit(stable_regularity_cli::run(std::env::args_os()));
}
