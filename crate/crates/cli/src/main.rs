use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(etaorbit_cli::run(std::env::args_os()))
}
