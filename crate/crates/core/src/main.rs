use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(pqpcp::cli::main_with_args(std::env::args().collect()))
}
