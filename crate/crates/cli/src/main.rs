fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    std::process::exit(whitney_lab_cli::run_main(&args));
}
