use std::io::{ErrorKind, Write};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;

mod args;
mod commands;
mod input;
mod report;

use args::Cli;
use report::{render, Report};

fn run(cli: &Cli) -> Result<i32> {
    let command = cli.command.name();
    let outcome = commands::run(&cli.command, cli.seed)?;
    let report = Report::new(command.clone(), cli.seed, &outcome);
    let body = render(&report, outcome.table.as_ref(), cli.format)?;
    let mut stdout = std::io::stdout().lock();
    match stdout.write_all(body.as_bytes()).and_then(|()| stdout.flush()) {
        Err(e) if e.kind() == ErrorKind::BrokenPipe => {}
        other => other.context("writing report")?,
    }
    if let Some(dir) = &cli.out_dir {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let path = dir.join(format!("{}.{}", command.replace(' ', "-"), cli.format.extension()));
        std::fs::write(&path, &body).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(outcome.status.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
