use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(nonholo::cli::run(std::env::args_os()))
}
