use annulus::cli_report::{emit_outputs, parse_config_for, run_scenario_with, RunOptions, Scenario};
use clap::Parser;
use std::path::PathBuf;
use std::process::ExitCode;

/// Spectra of weighted shifts and certified symbol bounds for multipliers
/// and Toeplitz operators.
#[derive(Parser)]
#[command(name = "annulus", version, about, long_about = None)]
struct Cli {
    /// spectrum | multiplier-check | toeplitz-check | cesaro-demo | counterexample
    scenario: Scenario,
    /// TOML scenario config
    #[arg(short, long)]
    config: PathBuf,
    /// Output directory (overrides `run.out_dir`)
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Seed (overrides `run.seed`)
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let text = match std::fs::read_to_string(&cli.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", cli.config.display());
            return ExitCode::from(2);
        }
    };
    let mut cfg = match parse_config_for(&text, Some(cli.scenario)) {
        Ok(c) => c,
        Err(errs) => {
            for e in &errs.0 {
                eprintln!("error: {e}");
            }
            return ExitCode::from(2);
        }
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = cli.out {
        cfg.out_dir = Some(out);
    }
    let out_dir = cfg.out_dir.clone().unwrap_or_else(|| PathBuf::from("annulus-out"));
    let report = run_scenario_with(&cfg, &RunOptions::from_env());
    let files = match emit_outputs(&report, &out_dir) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: writing outputs to {}: {e}", out_dir.display());
            return ExitCode::from(4);
        }
    };
    let s = &report.summary;
    println!(
        "{}: confirmed={} inconclusive={} violated_outside_spectrum={} error={}",
        cfg.scenario, s.confirmed, s.inconclusive, s.violated_outside_spectrum, s.error
    );
    for d in &report.diagnostics {
        println!("  {d}");
    }
    if let Some(e) = &report.error {
        eprintln!("error: {}: {}", e.kind, e.message);
    }
    println!("wrote {} and {} csv file(s)", files.report.display(), files.csv.len());
    ExitCode::from(report.exit_code() as u8)
}
