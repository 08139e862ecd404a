fn main() -> std::process::ExitCode {
    migrasim::cli::main_with(std::env::args_os())
}
