use std::process::ExitCode;

fn main() -> ExitCode {
    gwmb_cli::run()
}
