fn main() {
    let code = terrapath_cli::run(std::env::args_os());
    std::process::exit(code);
}
