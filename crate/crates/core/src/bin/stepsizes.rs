fn main() -> std::process::ExitCode {
    adaptive_stepsizes::cli::main_with_args(std::env::args_os())
}
