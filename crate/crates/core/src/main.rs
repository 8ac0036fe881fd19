fn main() {
    std::process::exit(contextua::cli::run(std::env::args_os()));
}
