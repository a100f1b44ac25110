use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use lueq_cli::cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(out.stdout.as_bytes());
            let _ = stdout.flush();
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("lueq: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
