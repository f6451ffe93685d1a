use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;

use clap::Parser;
use hplus_cli::{error::ExitKind, run, Cli};

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = Cli::parse();
    let outcome = match catch_unwind(AssertUnwindSafe(|| run(&cli, argv))) {
        Ok(r) => r,
        Err(_) => {
            eprintln!("error: internal failure (panic)");
            return ExitCode::from(ExitKind::Internal as u8);
        }
    };
    match outcome {
        Ok(report) => {
            if cli.json {
                match serde_json::to_string_pretty(&report) {
                    Ok(s) => println!("{s}"),
                    Err(e) => {
                        eprintln!("error: {e}");
                        return ExitCode::from(ExitKind::Internal as u8);
                    }
                }
            } else {
                print!("{}", report.render_text());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code() as u8)
        }
    }
}
