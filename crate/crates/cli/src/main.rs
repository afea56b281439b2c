fn main() {
    if let Err(e) = heislab_cli::run(std::env::args_os()) {
        eprintln!("heislab: {e}");
        std::process::exit(e.exit_code());
    }
}
