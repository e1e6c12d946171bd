fn main() {
    std::process::exit(ztnd_cli::run_cli(std::env::args_os()));
}
