use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, ValueEnum};
use ndescent::job::{run, JobSpec, VerifyLevel};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Verify {
    Fast,
    Full,
}

/// Explicit n-descent on an elliptic curve over F_p.
#[derive(Parser, Debug)]
#[command(name = "descend", version)]
struct Args {
    /// Job description (JSON).
    #[arg(long)]
    job: PathBuf,
    /// Where to write the report; stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the job seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the job verification level.
    #[arg(long, value_enum)]
    verify: Option<Verify>,
}

fn main() -> ExitCode {
    match descend(Args::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn descend(args: Args) -> anyhow::Result<bool> {
    let text = fs::read_to_string(&args.job)
        .with_context(|| format!("reading {}", args.job.display()))?;
    let mut job: JobSpec = serde_json::from_str(&text).context("parsing job")?;
    if let Some(s) = args.seed {
        job.seed = s;
    }
    match args.verify {
        Some(Verify::Fast) => job.verify = VerifyLevel::Fast,
        Some(Verify::Full) => job.verify = VerifyLevel::Full,
        None => {}
    }
    let report = run(&job)?;
    let json = report.to_json();
    match &args.out {
        Some(path) => {
            fs::write(path, json + "\n").with_context(|| format!("writing {}", path.display()))?
        }
        None => println!("{json}"),
    }
    eprintln!("{}", report.status);
    Ok(report.passed())
}
