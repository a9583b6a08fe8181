use std::process::ExitCode;

fn main() -> ExitCode {
    ahp_cli::cli::main_with_args(std::env::args_os())
}
