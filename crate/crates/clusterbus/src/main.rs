use std::process::ExitCode;

use clap::Parser;
use clusterbus::cli::{run, Cli};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(&cli) {
        Ok(failed) => ExitCode::from(if failed { 2 } else { 0 }),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn execute(cli: &Cli) -> anyhow::Result<bool> {
    let (report, common) = run(&cli.command)?;
    for m in &report.messages {
        eprintln!("{m}");
    }
    let text = report.render(common.format)?;
    match &common.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(report.failed)
}
