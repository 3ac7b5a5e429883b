//! The `simulate`, `curves`, `sweep` and `validate` commands, as library
//! calls. The binary only parses flags and maps errors to exit codes.

use crate::config::{ConfigError, ExperimentConfig};
use crate::ensemble::{
    derive_seed, lobe_occupancy, occupied_lobes, run_ensemble, summarize, windows_below, EnsembleError,
    EnsembleResult, Histogram, DEFAULT_BINS,
};
use crate::output::{
    arrivals_csv, curves_csv, histogram_csv, stats_block, sweep_csv, windows_block, write_atomic, HistogramBlock,
    LobesBlock, PhysicalBlock, Summary, SweepRow,
};
use std::path::{Path, PathBuf};
use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;
pub const EXIT_RUNTIME: i32 = 4;

/// Lobes tallied in the summary.
const REPORTED_LOBES: u32 = 12;

#[derive(Debug, Error)]
pub enum CommandError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Ensemble(#[from] EnsembleError),
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{failed} of {total} sweep values failed")]
    Sweep { failed: usize, total: usize },
}

impl CommandError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CommandError::Config(_) => EXIT_CONFIG,
            _ => EXIT_RUNTIME,
        }
    }
}

/// Settings given on the command line rather than in the file.
#[derive(Debug, Clone)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub out: PathBuf,
}

impl RunOptions {
    pub fn new(out: impl Into<PathBuf>) -> Self {
        RunOptions {
            seed: None,
            threads: None,
            out: out.into(),
        }
    }
}

/// Loads and validates a configuration, applying the seed override so that
/// the echoed configuration names the seed actually used.
pub fn load_config(path: &Path, opts: &RunOptions) -> Result<ExperimentConfig, ConfigError> {
    let mut cfg = ExperimentConfig::load(path)?;
    if let Some(seed) = opts.seed {
        cfg.ensemble.seed = seed;
    }
    Ok(cfg)
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CommandError> {
    write_atomic(dir, name, contents).map_err(|source| CommandError::Io {
        path: dir.join(name).display().to_string(),
        source,
    })
}

/// Histogram of the arrivals as configured.
pub fn histogram_for(cfg: &ExperimentConfig, taus: &[f64]) -> Histogram {
    match (cfg.histogram.bins, cfg.histogram.bin_width) {
        (None, Some(width)) => {
            let top = taus.iter().copied().fold(0.0, f64::max).max(width);
            Histogram::with_width(taus, 0.0, top, width)
        }
        (bins, _) => Histogram::default_for(taus, bins.unwrap_or(DEFAULT_BINS)),
    }
}

/// Summary document for a finished ensemble.
pub fn summarize_run(cfg: &ExperimentConfig, result: &EnsembleResult, hist: &Histogram) -> Result<Summary, CommandError> {
    let stats = summarize(result)?;
    let taus = result.arrival_times();
    let length = cfg.waveguide.length;
    let (below, bin_width, min_width) = cfg.window_settings();
    let windows = windows_below(&taus, below, bin_width, min_width);
    let physical = cfg.units.map(|u| PhysicalBlock {
        time_unit_s: u.time_unit(),
        mean_s: u.to_physical_time(stats.mean),
        std_s: u.to_physical_time(stats.std),
        tau_max_s: u.to_physical_time(stats.tau_max),
        length_m: u.to_physical_length(length),
        omega_rad_per_s: u.to_physical_frequency(cfg.waveguide.omega),
    });
    let mut echo = cfg.clone();
    echo.solver = crate::config::SolverSection::explicit(&result.solver);
    Ok(Summary {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        seed: result.seed,
        stats: stats_block(result.len(), &stats),
        histogram: HistogramBlock {
            bins: hist.bins(),
            lower: hist.bin_edges[0],
            upper: hist.bin_edges[hist.bins()],
            overflow: hist.overflow,
        },
        windows: windows_block(below, bin_width, min_width, &windows),
        lobes: LobesBlock {
            occupied: occupied_lobes(&taus, length),
            occupancy: lobe_occupancy(&taus, length, REPORTED_LOBES),
        },
        physical,
        config: echo,
    })
}

#[derive(Debug)]
pub struct SimulateReport {
    pub summary: Summary,
    pub files: Vec<PathBuf>,
}

/// Runs one ensemble and writes arrivals, histogram and summary.
pub fn simulate(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<SimulateReport, CommandError> {
    cfg.validate()?;
    let result = run_ensemble(
        cfg.ensemble.n,
        cfg.spin(),
        cfg.waveguide,
        &cfg.solver_config(),
        cfg.ensemble.seed,
        opts.threads,
    )?;
    let taus = result.arrival_times();
    let hist = histogram_for(cfg, &taus);
    let summary = summarize_run(cfg, &result, &hist)?;
    let files = vec![
        write(&opts.out, &cfg.output.arrivals, &arrivals_csv(&result))?,
        write(&opts.out, &cfg.output.histogram, &histogram_csv(&hist))?,
        write(&opts.out, &cfg.output.summary, &summary.to_toml())?,
    ];
    Ok(SimulateReport { summary, files })
}

/// Writes the reference curves on the configured grid.
pub fn curves(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<PathBuf, CommandError> {
    cfg.validate()?;
    let grid = cfg.curves_or_default().grid();
    write(&opts.out, &cfg.output.curves, &curves_csv(&grid, cfg.waveguide.length))
}

#[derive(Debug)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    pub file: PathBuf,
}

/// One ensemble per sweep value. Value `i` uses the seed derived from the
/// master seed and `i`; a failing value is flagged in its row and the sweep
/// carries on. The table is written even when rows failed, and the error
/// then reports how many.
pub fn sweep(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<SweepReport, CommandError> {
    cfg.validate()?;
    let plan = cfg
        .sweep
        .clone()
        .ok_or_else(|| ConfigError::Invalid("the sweep command needs a [sweep] section".into()))?;
    let rows: Vec<SweepRow> = plan
        .values
        .iter()
        .enumerate()
        .map(|(i, &value)| {
            let run = cfg.with_parameter(plan.parameter, value);
            let outcome = run_ensemble(
                run.ensemble.n,
                run.spin(),
                run.waveguide,
                &run.solver_config(),
                derive_seed(cfg.ensemble.seed, i as u64),
                opts.threads,
            )
            .and_then(|r| summarize(&r))
            .map_err(|e| e.to_string());
            SweepRow {
                value,
                n: run.ensemble.n,
                outcome,
            }
        })
        .collect();
    let file = write(&opts.out, &cfg.output.sweep, &sweep_csv(&rows))?;
    let failed = rows.iter().filter(|r| r.outcome.is_err()).count();
    if failed > 0 {
        for r in rows.iter().filter_map(|r| r.outcome.as_ref().err().map(|e| (r.value, e))) {
            eprintln!("{} = {}: {}", plan.parameter.name(), r.0, r.1);
        }
        return Err(CommandError::Sweep {
            failed,
            total: rows.len(),
        });
    }
    Ok(SweepReport { rows, file })
}
