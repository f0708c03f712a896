use anyhow::Context;
use clap::Parser;
use std::path::PathBuf;
use std::process::ExitCode;

/// Certification driver for indefinite-metric quantization of the free
/// photon field: runs per-module invariant suites and writes JSON reports.
#[derive(Debug, Parser)]
#[command(name = "gbcert", version, about)]
struct Args {
    /// Path to a TOML run configuration (embedded default when omitted).
    #[arg(long)]
    config: Option<PathBuf>,

    /// Suite to run: krein, gns, fock, gupta-bleuler, twopoint, or all.
    #[arg(long, default_value = "all")]
    suite: String,

    /// Write the JSON report here (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,

    /// Seed for the randomized property checks.
    #[arg(long, default_value_t = 7)]
    seed: u64,

    /// Number of refinement levels for the convergence tables (2..=3).
    #[arg(long, default_value_t = 3)]
    refine: usize,
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(all_passed) => {
            if all_passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(err) => {
            eprintln!("gbcert: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run(args: &Args) -> anyhow::Result<bool> {
    let config = gbcert::load_config(args.config.as_deref())?;
    let report = gbcert::run(&config, &args.suite, args.seed, args.refine).with_context(|| {
        format!(
            "unknown suite {:?}; expected one of {:?}",
            args.suite,
            gbcert::SUITES
        )
    })?;

    for line in report.summary_lines() {
        eprintln!("{line}");
    }
    eprintln!(
        "suite {}: {}",
        report.suite,
        if report.pass { "PASS" } else { "FAIL" }
    );

    let json = report.to_json();
    match &args.out {
        Some(path) => std::fs::write(path, &json)
            .with_context(|| format!("cannot write report to {}", path.display()))?,
        None => println!("{json}"),
    }
    Ok(report.pass)
}
