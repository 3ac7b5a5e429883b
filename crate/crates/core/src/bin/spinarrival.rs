use clap::{Parser, Subcommand};
use spinarrival::commands::{self, CommandError, RunOptions, EXIT_CONFIG, EXIT_OK};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(version, about = "Bohmian arrival-time simulations in a waveguide")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Experiment configuration (TOML)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the configured ensemble seed (at most 2^63 - 1, the
    /// largest integer the summary file can hold)
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(..=i64::MAX as u64))]
    seed: Option<u64>,
    /// Worker threads; all available cores by default
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    threads: Option<u16>,
    /// Output directory
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Run one ensemble; writes arrivals, histogram and summary
    Simulate,
    /// Write the flux and semiclassical reference curves
    Curves,
    /// Run one ensemble per value of the configured sweep
    Sweep,
    /// Check the configuration and exit
    Validate,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Some(path) = cli.config.as_deref() else {
        eprintln!("error: --config <path> is required");
        return ExitCode::from(commands::EXIT_USAGE as u8);
    };
    let opts = RunOptions {
        seed: cli.seed,
        threads: cli.threads.map(usize::from),
        out: cli.out.clone(),
    };
    let cfg = match commands::load_config(path, &opts) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG as u8);
        }
    };
    let result: Result<(), CommandError> = match cli.command {
        Command::Validate => {
            println!("{}: ok", path.display());
            Ok(())
        }
        Command::Simulate => commands::simulate(&cfg, &opts).map(|r| {
            let s = &r.summary.stats;
            println!(
                "{} trajectories: mean {:.6} std {:.6} tau_max {:.6} arrival_fraction {:.6}",
                s.n, s.mean, s.std, s.tau_max, s.arrival_fraction
            );
            for f in r.files {
                println!("wrote {}", f.display());
            }
        }),
        Command::Curves => commands::curves(&cfg, &opts).map(|f| println!("wrote {}", f.display())),
        Command::Sweep => commands::sweep(&cfg, &opts).map(|r| println!("wrote {}", r.file.display())),
    };
    match result {
        Ok(()) => ExitCode::from(EXIT_OK as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
