mod args;
mod run;

use std::process::ExitCode;

use clap::Parser;

use args::Cli;
use run::Failure;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_io_or_parse() { 2 } else { 1 })
        }
        Err(Failure::Invalid(report)) => {
            for v in &report.violations {
                println!("{v}");
            }
            eprintln!("error: relation is invalid ({} violations)", report.violations.len());
            ExitCode::from(1)
        }
    }
}
