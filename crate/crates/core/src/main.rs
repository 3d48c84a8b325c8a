use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use triple_avg::cli::{exit_code, run, Cli};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match run(&cli) {
        Ok((text, code)) => {
            let mut out = std::io::stdout().lock();
            // A closed pipe is not worth a panic.
            let _ = out.write_all(text.as_bytes());
            ExitCode::from(code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
