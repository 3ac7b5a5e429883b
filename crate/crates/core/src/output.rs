//! Result files: CSV tables and the TOML run summary.

use crate::config::ExperimentConfig;
use crate::ensemble::{EnsembleResult, Entry, Histogram, SummaryStats, Window};
use crate::reference::{flux_density, flux_lobe_approx, flux_tail, semiclassical_density};
use serde::Serialize;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

pub const ARRIVALS_HEADER: &str = "index,x0,y0,z0,tau,censored";
pub const HISTOGRAM_HEADER: &str = "bin_left,bin_right,count,density";
pub const CURVES_HEADER: &str = "tau,flux,flux_tail,flux_lobes,semiclassical";
pub const SWEEP_HEADER: &str = "param_value,mean,std,tau_max,arrival_fraction,n";

/// Value of the `censored` column.
pub const ARRIVED: u8 = 0;
pub const CENSORED: u8 = 1;
pub const FAILED: u8 = 2;

/// 15 significant digits in scientific notation.
pub fn sig15(x: f64) -> String {
    format!("{x:.14e}")
}

/// One row per trajectory; `tau` is empty unless the trajectory arrived.
pub fn arrivals_csv(result: &EnsembleResult) -> String {
    let mut out = String::with_capacity(96 * (result.len() + 1));
    out.push_str(ARRIVALS_HEADER);
    out.push('\n');
    for (i, entry) in result.records.iter().enumerate() {
        let p = entry.initial();
        let (tau, flag) = match entry {
            Entry::Failed { .. } => (String::new(), FAILED),
            e => match e.arrival_time() {
                Some(t) => (sig15(t), ARRIVED),
                None => (String::new(), CENSORED),
            },
        };
        let _ = writeln!(out, "{i},{},{},{},{tau},{flag}", sig15(p.x), sig15(p.y), sig15(p.z));
    }
    out
}

pub fn histogram_csv(hist: &Histogram) -> String {
    let mut out = String::new();
    out.push_str(HISTOGRAM_HEADER);
    out.push('\n');
    for i in 0..hist.bins() {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            sig15(hist.bin_edges[i]),
            sig15(hist.bin_edges[i + 1]),
            hist.counts[i],
            sig15(hist.density(i))
        );
    }
    out
}

/// Reference densities on `grid`; `flux_lobes` is left empty where the
/// short-time approximation does not apply.
pub fn curves_csv(grid: &[f64], length: f64) -> String {
    let mut out = String::new();
    out.push_str(CURVES_HEADER);
    out.push('\n');
    for &tau in grid {
        let lobes = flux_lobe_approx(tau, length).map(sig15).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{lobes},{}",
            sig15(tau),
            sig15(flux_density(tau, length)),
            sig15(flux_tail(tau, length)),
            sig15(semiclassical_density(tau, length))
        );
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub n: usize,
    /// Statistics, or the reason the run failed.
    pub outcome: Result<SummaryStats, String>,
}

/// A failed row keeps its value and size and leaves the four statistics
/// empty, which is how failures are flagged.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::new();
    out.push_str(SWEEP_HEADER);
    out.push('\n');
    for row in rows {
        match &row.outcome {
            Ok(s) => {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    sig15(row.value),
                    sig15(s.mean),
                    sig15(s.std),
                    sig15(s.tau_max),
                    sig15(s.arrival_fraction),
                    row.n
                );
            }
            Err(_) => {
                let _ = writeln!(out, "{},,,,,{}", sig15(row.value), row.n);
            }
        }
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct StatsBlock {
    pub n: usize,
    pub arrivals: usize,
    pub censored_count: usize,
    pub failed_count: usize,
    pub arrival_fraction: f64,
    pub mean: f64,
    pub std: f64,
    pub standard_error: f64,
    pub tau_max: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct HistogramBlock {
    pub bins: usize,
    pub lower: f64,
    pub upper: f64,
    pub overflow: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct WindowsBlock {
    pub below: f64,
    pub bin_width: f64,
    pub min_width: f64,
    pub count: usize,
    pub intervals: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LobesBlock {
    /// Consecutive occupied lobes counting from the main one.
    pub occupied: u32,
    pub occupancy: Vec<usize>,
}

/// Statistics converted with the configured unit system.
#[derive(Debug, Clone, Serialize)]
pub struct PhysicalBlock {
    pub time_unit_s: f64,
    pub mean_s: f64,
    pub std_s: f64,
    pub tau_max_s: f64,
    pub length_m: f64,
    pub omega_rad_per_s: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    pub stats: StatsBlock,
    pub histogram: HistogramBlock,
    pub windows: WindowsBlock,
    pub lobes: LobesBlock,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub physical: Option<PhysicalBlock>,
    pub config: ExperimentConfig,
}

impl Summary {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("summary always serialises")
    }
}

pub fn stats_block(n: usize, s: &SummaryStats) -> StatsBlock {
    StatsBlock {
        n,
        arrivals: s.arrivals,
        censored_count: s.censored,
        failed_count: s.failed,
        arrival_fraction: s.arrival_fraction,
        mean: s.mean,
        std: s.std,
        standard_error: s.standard_error(),
        tau_max: s.tau_max,
    }
}

pub fn windows_block(below: f64, bin_width: f64, min_width: f64, windows: &[Window]) -> WindowsBlock {
    WindowsBlock {
        below,
        bin_width,
        min_width,
        count: windows.len(),
        intervals: windows.iter().map(|w| [w.start, w.end]).collect(),
    }
}

/// Writes `contents` to `dir/name` through a temporary file in the same
/// directory, so readers never see a partial file.
pub fn write_atomic(dir: &Path, name: &str, contents: &str) -> std::io::Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let target = dir.join(name);
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    let result = (|| {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
        std::fs::rename(&tmp, &target)
    })();
    if result.is_err() {
        let _ = std::fs::remove_file(&tmp);
    }
    result.map(|_| target)
}
