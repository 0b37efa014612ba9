use std::process::ExitCode;

use clap::Parser;
use fibstat_cli::{run, RunConfig};

fn main() -> ExitCode {
    let config = RunConfig::parse();
    match run(&config) {
        Ok(out) => {
            for l in &out.lines {
                println!("{l}");
            }
            for f in &out.files {
                eprintln!("wrote {}", f.display());
            }
            if let Some(e) = &out.error {
                eprintln!("{}", e.record());
            }
            ExitCode::from(out.exit_code as u8)
        }
        Err(e) => {
            eprintln!("{}", e.record());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
