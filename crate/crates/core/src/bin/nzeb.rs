use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use nzeb::sweep::{explain_run, run_sweep, OutputFormat, SweepRequest};

/// Sweep install years for a net-zero home scenario and write savings, LCOE and
/// crossover tables.
#[derive(Parser, Debug)]
#[command(name = "nzeb", version)]
struct Cli {
    /// Scenario JSON document.
    #[arg(long)]
    scenario: PathBuf,
    /// Cost trajectory CSV.
    #[arg(long)]
    costs: PathBuf,
    /// First install year.
    #[arg(long, default_value_t = 2020)]
    from: i32,
    /// Last install year (inclusive).
    #[arg(long, default_value_t = 2050)]
    to: i32,
    /// Output directory for the CSV tables.
    #[arg(long, required_unless_present = "explain")]
    out: Option<PathBuf>,
    /// Comma-separated variant labels, e.g. `no-itc,itc,storage-50+itc`.
    #[arg(long, value_delimiter = ',', default_value = "no-itc,itc")]
    variants: Vec<String>,
    /// Print a per-year cash-flow breakdown for this install year.
    #[arg(long)]
    explain: Option<i32>,
    /// Output formats: csv, plotdata.
    #[arg(long, value_delimiter = ',', default_value = "csv")]
    formats: Vec<OutputFormat>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let req = SweepRequest {
        scenario_path: cli.scenario,
        costs_path: cli.costs,
        start_year: cli.from,
        end_year: cli.to,
        out_dir: cli.out,
        formats: cli.formats,
        variants: cli.variants,
        explain_year: cli.explain,
    };

    if req.explain_year.is_some() {
        match explain_run(&req) {
            Ok(report) => print!("{report}"),
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(e.exit_code() as u8);
            }
        }
        if req.out_dir.is_none() {
            return ExitCode::SUCCESS;
        }
    }

    match run_sweep(&req) {
        Ok(summary) => {
            for w in &summary.tables.warnings {
                eprintln!("warning: {w}");
            }
            for f in &summary.files {
                eprintln!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
