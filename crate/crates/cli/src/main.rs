//! `czlab` command line: run verification experiments from a config file, or
//! list the experiment catalog.
//!
//! Exit codes: 0 all rules pass, 1 rule failures, 2 bad config or unknown
//! experiment, 3 I/O failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use czlab_cli::config::{ConfigError, RunConfig};
use czlab_cli::runner::RunError;
use czlab_cli::{apply_overrides, catalog, run_to_dir};

#[derive(Parser)]
#[command(name = "czlab", about = "Numerical verification lab for interior W^{2,p} estimates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run experiments from a config file and write report files.
    Run {
        /// TOML config path.
        #[arg(long)]
        config: PathBuf,
        /// Restrict the run to these experiments (repeatable).
        #[arg(long = "experiment")]
        experiments: Vec<String>,
        /// Override the config seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory (default: config `out_dir` or `./out`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Maximal-operator backend: mask | fft-like | brute.
        #[arg(long)]
        maximal_backend: Option<String>,
        /// Radius ladder: geometric | dense.
        #[arg(long)]
        radius_ladder: Option<String>,
        /// Serialize representative fields next to the reports.
        #[arg(long)]
        dump_fields: bool,
    },
    /// Print the experiment catalog.
    List {
        /// Machine-readable JSON output.
        #[arg(long)]
        json: bool,
    },
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::List { json } => {
            if json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(catalog::CATALOG).expect("catalog serializes")
                );
            } else {
                print!("{}", catalog::render_text());
            }
            ExitCode::SUCCESS
        }
        Command::Run {
            config,
            experiments,
            seed,
            out,
            maximal_backend,
            radius_ladder,
            dump_fields,
        } => run_command(RunArgs {
            config,
            experiments,
            seed,
            out,
            maximal_backend,
            radius_ladder,
            dump_fields,
        }),
    }
}

struct RunArgs {
    config: PathBuf,
    experiments: Vec<String>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    maximal_backend: Option<String>,
    radius_ladder: Option<String>,
    dump_fields: bool,
}

fn run_command(args: RunArgs) -> ExitCode {
    let text = match std::fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("czlab: cannot read config {}: {e}", args.config.display());
            return ExitCode::from(3);
        }
    };
    let mut cfg = match RunConfig::parse(&text) {
        Ok(c) => c,
        Err(e) => return config_error(e),
    };
    if let Err(e) = apply_overrides(
        &mut cfg,
        &args.experiments,
        args.seed,
        args.maximal_backend,
        args.radius_ladder,
        args.dump_fields,
    ) {
        return config_error(e);
    }
    let out_dir = args.out.unwrap_or_else(|| {
        cfg.out_dir
            .clone()
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from("out"))
    });
    match run_to_dir(&cfg, &out_dir) {
        Ok(outcome) => {
            print!(
                "{}",
                czlab_cli::output::render_summary(&cfg, &outcome.reports, &outcome.rules)
            );
            println!("reports written to {}", out_dir.display());
            if outcome.all_pass() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(RunError::Io(e)) => {
            eprintln!("czlab: i/o failure: {e}");
            ExitCode::from(3)
        }
        Err(RunError::Config(msg)) => {
            eprintln!("czlab: {msg}");
            ExitCode::from(2)
        }
        Err(RunError::Core(e)) => {
            eprintln!("czlab: experiment failed: {e}");
            ExitCode::from(1)
        }
    }
}

fn config_error(e: ConfigError) -> ExitCode {
    eprintln!("czlab: {e}");
    ExitCode::from(2)
}
