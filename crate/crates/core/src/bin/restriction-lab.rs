use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use restriction_lab::runner::{emit_plot_data, load_config, load_reports, run, write_outputs, OPERATIONS};

#[derive(Parser)]
#[command(name = "restriction-lab", version, about = "Run restriction-lab experiment configurations")]
struct Cli {
    /// Override the configuration seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every check of a configuration and write report JSON and CSV tables.
    Run {
        config: PathBuf,
        /// Override the configured output prefix.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// List the operation names a configuration may use.
    ListChecks,
    /// Write plot-ready CSV tables of one series kind from a report.
    EmitPlots {
        report: PathBuf,
        #[arg(long)]
        kind: String,
        #[arg(long, default_value = "plots")]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn execute(cli: Cli) -> restriction_lab::Result<bool> {
    match cli.command {
        Command::Run { config, output } => {
            let mut cfg = load_config(&config)?;
            if let Some(seed) = cli.seed {
                cfg.seed = seed;
            }
            let prefix = output.unwrap_or_else(|| PathBuf::from(&cfg.output));
            let report = run(&cfg, cli.jobs)?;
            for r in &report.reports {
                println!("{:<6} {:<40} estimate = {:.6e}", format!("{:?}", r.status).to_lowercase(), r.check_id, r.estimate);
            }
            for path in write_outputs(&report, &prefix)? {
                eprintln!("wrote {}", path.display());
            }
            println!("{} of {} checks passed", report.summary.passed, report.summary.total);
            Ok(report.all_passed())
        }
        Command::ListChecks => {
            for (name, summary) in OPERATIONS {
                println!("{name:<24} {summary}");
            }
            Ok(true)
        }
        Command::EmitPlots { report, kind, out } => {
            for path in emit_plot_data(&load_reports(&report)?, &kind, &out)? {
                println!("{}", path.display());
            }
            Ok(true)
        }
    }
}
