use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gwa_bandit_cli::commands::{self, RunOptions, Source};
use gwa_bandit_cli::presets::PRESETS;

#[derive(Parser)]
#[command(
    name = "gwa-bandit",
    version,
    about = "Bandit policy experiments and parameter sweeps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write per-policy curve CSVs.
    Experiment(RunArgs),
    /// Run a parameter sweep and write the grid CSV.
    Sweep(RunArgs),
    /// List the built-in presets.
    Presets,
}

#[derive(Args)]
struct RunArgs {
    /// Built-in preset name.
    #[arg(long, conflicts_with = "config", required_unless_present = "config")]
    preset: Option<String>,
    /// JSON config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override the number of trials.
    #[arg(long)]
    trials: Option<usize>,
    /// Override the master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    threads: usize,
    #[arg(long, default_value = "results")]
    out_dir: PathBuf,
    /// Use the full trial counts, horizons and grid resolution for presets.
    #[arg(long)]
    full_scale: bool,
}

impl RunArgs {
    fn split(self) -> (Source, RunOptions) {
        let source = match (self.preset, self.config) {
            (Some(p), _) => Source::Preset(p),
            (None, Some(c)) => Source::File(c),
            (None, None) => unreachable!("clap requires one of --preset/--config"),
        };
        let opts = RunOptions {
            trials: self.trials,
            seed: self.seed,
            threads: self.threads,
            out_dir: self.out_dir,
            full_scale: self.full_scale,
        };
        (source, opts)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Presets => {
            for p in PRESETS {
                println!("{:<22} {}", p.name, p.description);
            }
            Ok(())
        }
        Command::Experiment(args) => {
            let (source, opts) = args.split();
            commands::experiment(&source, &opts).map(|run| {
                print!("{}", commands::experiment_summary(&run));
                println!(
                    "wrote {} and {}",
                    run.combined_csv.display(),
                    run.manifest.display()
                );
            })
        }
        Command::Sweep(args) => {
            let (source, opts) = args.split();
            commands::sweep(&source, &opts).map(|run| {
                print!("{}", commands::sweep_summary(&run));
                println!(
                    "wrote {} and {}",
                    run.grid_csv.display(),
                    run.manifest.display()
                );
            })
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
