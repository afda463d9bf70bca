fn main() {
    std::process::exit(skillforge_cli::main_with_args(std::env::args_os()));
}
