mod args;
mod job;
mod output;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use pgen_core::{Error, Limits};

use crate::args::{Cli, Command};
use crate::job::{Job, Manifest};

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Precondition(_) | Error::Format(_) | Error::NoAdmissibleDigit { .. } => 2,
        Error::ResourceCap(_) => 3,
        Error::Io(_) => 4,
        Error::Internal(_) => 1,
    }
}

fn run(cli: &Cli) -> Result<String, Error> {
    let manifest = match (&cli.command, Job::from_cli(cli)?) {
        (Command::Replay { report }, _) => job::load_manifest(report)?,
        (_, Some(job)) => Manifest::new(job, cli.global.format),
        (_, None) => return Err(Error::Internal("no job".into())),
    };
    let out = manifest.job.run(&Limits::from_env())?;
    output::render(&manifest, &out).map_err(Error::Internal)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(text) => {
            let mut stdout = std::io::stdout().lock();
            if stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .is_err()
            {
                return ExitCode::from(4);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
