use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use stirap::output::Format;
use stirap::presets::manifest_path;
use stirap::run::{dressed_command, simulate_command, sweep_command};
use stirap::{from_file, read_config_file, run_preset, PresetOptions, RunConfig, RunError, PRESETS};

/// Chirped and fractional STIRAP simulator.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Propagate a scenario and write its trajectory.
    Simulate(RunArgs),
    /// Propagate and write the continuity-tracked dressed frame.
    Dressed(RunArgs),
    /// Evaluate a two-parameter grid of final observables.
    Sweep(RunArgs),
    /// Regenerate a figure into a directory with a manifest.
    Preset {
        #[arg(long)]
        id: String,
        #[arg(long)]
        out: PathBuf,
        /// Points per sweep axis.
        #[arg(long, default_value_t = 81)]
        resolution: usize,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Print the registered preset ids.
    ListPresets,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Output file; standard output when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Args)]
struct Overrides {
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    format: Option<Format>,
}

fn load(args: &RunArgs) -> Result<RunConfig, RunError> {
    let text = std::fs::read_to_string(&args.config).map_err(|e| RunError::io(&args.config, e))?;
    let mut file = read_config_file(&text)?;
    let o = &args.overrides;
    file.tol = o.tol.or(file.tol);
    file.workers = o.workers.or(file.workers);
    file.format = o.format.or(file.format);
    file.output = args.output.clone().or(file.output);
    Ok(from_file(&file)?)
}

fn run(cli: Cli) -> Result<(), RunError> {
    match cli.command {
        Command::Simulate(a) => simulate_command(&load(&a)?),
        Command::Dressed(a) => dressed_command(&load(&a)?),
        Command::Sweep(a) => sweep_command(&load(&a)?).map(|_| ()),
        Command::Preset {
            id,
            out,
            resolution,
            overrides,
        } => {
            let opts = PresetOptions {
                resolution,
                workers: overrides.workers,
                format: overrides.format.unwrap_or(Format::Csv),
                tol: overrides.tol,
            };
            let m = run_preset(&id, &out, &opts)?;
            eprintln!(
                "{id}: {} files in {:.1} s, manifest {}",
                m.files.len(),
                m.wall_time_s,
                manifest_path(&out, &id).display()
            );
            Ok(())
        }
        Command::ListPresets => {
            for p in PRESETS {
                let mark = if p.reconstructed { " (reconstructed)" } else { "" };
                println!("{:<8} {}{mark}", p.id, p.title);
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
