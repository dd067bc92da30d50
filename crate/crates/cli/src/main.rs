mod args;
mod commands;

use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use crate::args::Cli;
use crate::commands::{run, Artifact, Failure};

fn write_artifact(artifact: &Artifact, cli: &Cli) -> anyhow::Result<()> {
    let text = match artifact {
        Artifact::Csv(s) => s.clone(),
        Artifact::Json(v) => {
            let mut s = serde_json::to_string_pretty(v)?;
            s.push('\n');
            s
        }
    };
    match &cli.global.output {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };

    if cli.global.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.global.threads)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }

    let outcome = match run(&cli) {
        Ok(outcome) => outcome,
        Err(failure) => {
            eprintln!("error: {failure}");
            return ExitCode::from(failure.exit_code());
        }
    };
    if let Err(e) = write_artifact(&outcome.artifact, &cli) {
        eprintln!("error: {}", Failure::Other(e));
        return ExitCode::from(1);
    }
    if outcome.not_converged {
        eprintln!("warning: power iteration did not converge; result written and flagged");
        return ExitCode::from(3);
    }
    ExitCode::SUCCESS
}
