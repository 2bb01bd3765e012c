//! `wavelab` command-line entry point.

fn main() -> std::process::ExitCode {
    wavelab::cli::main_with_args(std::env::args_os())
}
