use std::io::{self, Write};
use std::process::ExitCode;

use clap::Parser;
use stochprod_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let usage_error = e.use_stderr();
            let _ = e.print();
            // usage errors are input errors (exit 2); --help and --version exit 0
            return ExitCode::from(if usage_error { 2 } else { 0 });
        }
    };
    let out = run(&cli);
    let _ = io::stdout().write_all(out.stdout.as_bytes());
    let _ = io::stderr().write_all(out.stderr.as_bytes());
    ExitCode::from(out.code() as u8)
}
