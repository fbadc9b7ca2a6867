use std::io;
use std::process::ExitCode;

use clap::Parser;
use weingarten_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // Exit code 2 is reserved for undetermined results.
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = cli
        .opts
        .resolve()
        .map_err(Into::into)
        .and_then(|cfg| run(cli.command, &cfg, &mut io::stdout().lock()));
    match result {
        Ok(outcome) => ExitCode::from(outcome.exit_code() as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
