use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use prelog_cli::{configure_threads, run, Cli, EXIT_USAGE, THREADS_ENV};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cap = std::env::var(THREADS_ENV).ok();
    let result = configure_threads(cap.as_deref()).and_then(|_| run(cli));
    match result {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(out.stdout.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(EXIT_USAGE as u8);
            }
            ExitCode::from(out.code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE as u8)
        }
    }
}
