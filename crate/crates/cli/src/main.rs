use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use kappa_cli::{exit_code, run, Cli, RunConfig, CAP_ENV};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let env_cap = std::env::var(CAP_ENV).ok();
    let outcome = match RunConfig::from_cli(cli, env_cap.as_deref()) {
        Ok(config) => run(&config, &mut std::io::stdin().lock()),
        Err(err) => {
            eprintln!("error: {err}");
            return ExitCode::from(exit_code(&err) as u8);
        }
    };
    let _ = std::io::stdout().write_all(outcome.stdout.as_bytes());
    let _ = std::io::stderr().write_all(outcome.stderr.as_bytes());
    ExitCode::from(outcome.code as u8)
}
