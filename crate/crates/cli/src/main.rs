mod commands;
mod config;
mod render;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use config::{Cli, Setup};

const EXIT_USAGE: u8 = 2;
const EXIT_THEORY: u8 = 3;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            let theory = e.downcast_ref::<soergel_core::Error>().is_some_and(|e| e.is_theory_violation());
            ExitCode::from(if theory { EXIT_THEORY } else { EXIT_USAGE })
        }
    }
}

fn run(cli: &Cli) -> anyhow::Result<ExitCode> {
    if let Some(j) = cli.jobs {
        rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build_global()?;
    }
    let setup = Setup::new(cli)?;
    let (text, ok) = commands::execute(&setup, &cli.command)?;
    match &cli.out {
        Some(path) => std::fs::write(path, &text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(EXIT_THEORY) })
}
