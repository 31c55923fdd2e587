use std::process::ExitCode;

use clap::Parser;
use mdist::{run, Cli};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // usage errors share the invalid-input code; 2 is reserved for missing data
            return if e.use_stderr() { ExitCode::from(mdist::EXIT_INVALID) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(out) => {
            if let Some(line) = out {
                println!("{line}");
            }
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("mdist: {f}");
            ExitCode::from(f.code)
        }
    }
}
