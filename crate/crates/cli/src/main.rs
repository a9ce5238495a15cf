use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(temporal_audit_cli::run(std::env::args_os()))
}
