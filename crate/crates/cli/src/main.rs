use std::io::{self, Write};
use std::process::ExitCode;

use relbell_cli::{execute, parse_args, CliError, EXIT_USAGE};

fn main() -> ExitCode {
    let invocation = match parse_args(std::env::args_os()) {
        Ok(inv) => inv,
        Err(CliError::Clap(e)) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 } as u8);
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    for w in &invocation.warnings {
        eprintln!("warning: {w}");
    }
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let result = execute(&invocation.config, &mut out).and_then(|()| out.flush().map_err(CliError::from));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
