use std::process::ExitCode;

use clap::Parser;
use jetvar::cli::{execute, render, Args};

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            // usage errors are input errors; 2 is reserved for failed checks
            return if e.use_stderr() { ExitCode::from(jetvar::cli::EXIT_INPUT as u8) } else { ExitCode::SUCCESS };
        }
    };
    let rep = execute(&args);
    let text = render(&rep, args.format);
    if let Some(e) = &rep.error {
        eprintln!("jetvar {}: {e}", rep.command);
    }
    match &args.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("jetvar: cannot write {}: {e}", path.display());
                return ExitCode::from(jetvar::cli::EXIT_INPUT as u8);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(rep.exit_code as u8)
}
