//! Born-rule sampling, ensemble execution and arrival-time statistics.

use crate::dynamics::{integrate_trajectory, ArrivalRecord, DynamicsError, Outcome, SolverConfig};
use crate::state::{Position3, SpinOrientation, UnitSystem, WaveguideParams};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Open01, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};
use thiserror::Error;

/// Largest tolerated fraction of failed trajectories in a run.
pub const MAX_FAILURE_FRACTION: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EnsembleError {
    #[error("ensemble size must be at least 1")]
    Empty,
    #[error(transparent)]
    Config(#[from] crate::state::StateError),
    #[error(transparent)]
    Solver(DynamicsError),
    #[error("{failed} of {total} trajectories failed (limit {limit}); first failure: {first}")]
    FailureRate {
        failed: usize,
        total: usize,
        limit: f64,
        first: String,
    },
    #[error("no trajectory arrived")]
    NoArrivals,
    #[error("could not build a worker pool: {0}")]
    Pool(String),
}

/// Per-trajectory result inside an ensemble.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Entry {
    Finished(ArrivalRecord),
    Failed { initial: Position3, reason: String },
}

impl Entry {
    pub fn initial(&self) -> Position3 {
        match self {
            Entry::Finished(r) => r.initial,
            Entry::Failed { initial, .. } => *initial,
        }
    }

    pub fn arrival_time(&self) -> Option<f64> {
        match self {
            Entry::Finished(r) => r.arrival_time(),
            Entry::Failed { .. } => None,
        }
    }

    pub fn is_censored(&self) -> bool {
        matches!(self, Entry::Finished(ArrivalRecord { outcome: Outcome::Censored, .. }))
    }

    pub fn crossings(&self) -> Option<u32> {
        match self {
            Entry::Finished(ArrivalRecord { outcome: Outcome::Arrived { crossings, .. }, .. }) => {
                Some(*crossings)
            }
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleResult {
    pub spin: SpinOrientation,
    pub params: WaveguideParams,
    pub solver: SolverConfig,
    pub seed: u64,
    pub records: Vec<Entry>,
    pub censored_count: usize,
    pub failed_count: usize,
}

impl EnsembleResult {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// The first `n` trajectories. Each trajectory draws from its own
    /// substream, so this equals a run of size `n` with the same seed.
    pub fn prefix(&self, n: usize) -> EnsembleResult {
        let records = self.records[..n.min(self.len())].to_vec();
        EnsembleResult {
            censored_count: records.iter().filter(|e| e.is_censored()).count(),
            failed_count: records.iter().filter(|e| matches!(e, Entry::Failed { .. })).count(),
            records,
            ..*self
        }
    }

    /// Arrival times in trajectory order.
    pub fn arrival_times(&self) -> Vec<f64> {
        self.records.iter().filter_map(Entry::arrival_time).collect()
    }
}

/// Inverse of `F(z) = z - sin(2 pi z) / (2 pi)`, the CDF of `2 sin^2(pi z)`
/// on `(0, 1)`, by Newton iteration kept inside a shrinking bracket.
pub fn axial_quantile(u: f64) -> f64 {
    let cdf = |z: f64| z - (TAU * z).sin() / TAU;
    // cubic behaviour at both ends, linear in the middle
    let mut z = if u < 0.1 {
        (1.5 * u / (PI * PI)).cbrt()
    } else if u > 0.9 {
        1.0 - (1.5 * (1.0 - u) / (PI * PI)).cbrt()
    } else {
        u
    };
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..100 {
        let f = cdf(z) - u;
        if f > 0.0 {
            hi = hi.min(z);
        } else {
            lo = lo.max(z);
        }
        let slope = 2.0 * (PI * z).sin().powi(2);
        let mut next = z - f / slope;
        if !(next > lo && next < hi) || slope == 0.0 {
            next = 0.5 * (lo + hi);
        }
        let step = (next - z).abs();
        z = next;
        if step <= 1e-16 * z.max(1e-300) || hi - lo < 1e-16 {
            break;
        }
    }
    z
}

fn substream(seed: u64, index: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Seed for member `index` of a family of runs (one per sweep value),
/// derived from `master` on a substream no ensemble uses.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut rng = ChaCha12Rng::seed_from_u64(master);
    rng.set_stream(u64::MAX);
    rng.set_word_pos(2 * index as u128);
    rng.next_u64()
}

/// Initial point `index` of the ensemble keyed by `seed`.
pub fn sample_point(index: u64, params: &WaveguideParams, seed: u64) -> Position3 {
    let mut rng = substream(seed, index);
    let u: f64 = rng.sample(Open01);
    let gx: f64 = rng.sample(StandardNormal);
    let gy: f64 = rng.sample(StandardNormal);
    let sigma = (0.5 / params.omega).sqrt();
    Position3::new(sigma * gx, sigma * gy, axial_quantile(u))
}

/// `n` i.i.d. draws from `|Psi_0|^2`.
pub fn sample_initial(n: usize, params: &WaveguideParams, seed: u64) -> Vec<Position3> {
    (0..n as u64).map(|i| sample_point(i, params, seed)).collect()
}

/// Integrates `n` Born-distributed trajectories. The result depends only on
/// the arguments, never on `threads` (`None` uses every available core).
pub fn run_ensemble(
    n: usize,
    spin: SpinOrientation,
    params: WaveguideParams,
    solver: &SolverConfig,
    seed: u64,
    threads: Option<usize>,
) -> Result<EnsembleResult, EnsembleError> {
    if n == 0 {
        return Err(EnsembleError::Empty);
    }
    spin.validate()?;
    params.validate()?;
    solver.validate(&params).map_err(EnsembleError::Solver)?;
    let job = || -> Vec<Entry> {
        (0..n as u64)
            .into_par_iter()
            .map(|i| {
                let initial = sample_point(i, &params, seed);
                match integrate_trajectory(initial, spin, params, solver) {
                    Ok(record) => Entry::Finished(record),
                    Err(e) => Entry::Failed { initial, reason: e.to_string() },
                }
            })
            .collect()
    };
    let records = match threads {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| EnsembleError::Pool(e.to_string()))?
            .install(job),
        None => job(),
    };
    let censored_count = records.iter().filter(|e| e.is_censored()).count();
    let failed: Vec<&Entry> = records.iter().filter(|e| matches!(e, Entry::Failed { .. })).collect();
    if failed.len() as f64 > MAX_FAILURE_FRACTION * n as f64 {
        let first = match failed[0] {
            Entry::Failed { reason, .. } => reason.clone(),
            _ => unreachable!(),
        };
        return Err(EnsembleError::FailureRate {
            failed: failed.len(),
            total: n,
            limit: MAX_FAILURE_FRACTION,
            first,
        });
    }
    let failed_count = failed.len();
    Ok(EnsembleResult {
        spin,
        params,
        solver: *solver,
        seed,
        records,
        censored_count,
        failed_count,
    })
}

/// Binned arrival times. Arrivals beyond the last edge go to `overflow`, those
/// before the first edge to `underflow`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub bin_edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub underflow: u64,
    pub overflow: u64,
    /// Total number of arrivals the densities are normalised by.
    pub normalization: u64,
}

/// Default number of uniform bins.
pub const DEFAULT_BINS: usize = 400;
/// Upper edge of the default binning, as a quantile of the arrivals.
pub const DEFAULT_UPPER_QUANTILE: f64 = 0.999;

impl Histogram {
    /// `bins` uniform bins over `[lo, hi]`.
    pub fn uniform(samples: &[f64], lo: f64, hi: f64, bins: usize) -> Self {
        assert!(bins > 0 && hi > lo, "invalid binning [{lo}, {hi}] x {bins}");
        let width = (hi - lo) / bins as f64;
        let bin_edges: Vec<f64> = (0..=bins).map(|i| lo + width * i as f64).collect();
        let mut counts = vec![0u64; bins];
        let (mut underflow, mut overflow) = (0, 0);
        for &x in samples {
            if x < lo {
                underflow += 1;
            } else if x > hi {
                overflow += 1;
            } else {
                let i = (((x - lo) / width) as usize).min(bins - 1);
                // guard the floor against rounding at an edge
                let i = if x < bin_edges[i] { i - 1 } else if i + 1 < bins && x >= bin_edges[i + 1] { i + 1 } else { i };
                counts[i] += 1;
            }
        }
        Histogram {
            bin_edges,
            counts,
            underflow,
            overflow,
            normalization: samples.len() as u64,
        }
    }

    /// Uniform bins of `width` starting at `lo` and covering `hi`.
    pub fn with_width(samples: &[f64], lo: f64, hi: f64, width: f64) -> Self {
        let bins = ((hi - lo) / width).ceil().max(1.0) as usize;
        Self::uniform(samples, lo, lo + width * bins as f64, bins)
    }

    /// `DEFAULT_BINS` bins over `(0, q]`, `q` the 0.999 quantile.
    pub fn default_for(samples: &[f64], bins: usize) -> Self {
        let upper = quantile(samples, DEFAULT_UPPER_QUANTILE).unwrap_or(1.0);
        Self::uniform(samples, 0.0, upper.max(f64::MIN_POSITIVE), bins)
    }

    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn width(&self, i: usize) -> f64 {
        self.bin_edges[i + 1] - self.bin_edges[i]
    }

    /// `count / (normalization * width)`, an estimate of the arrival density.
    pub fn density(&self, i: usize) -> f64 {
        if self.normalization == 0 {
            return 0.0;
        }
        self.counts[i] as f64 / (self.normalization as f64 * self.width(i))
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum::<u64>() + self.underflow + self.overflow
    }
}

/// Empirical quantile (nearest rank).
pub fn quantile(samples: &[f64], q: f64) -> Option<f64> {
    if samples.is_empty() {
        return None;
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let rank = ((q * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    Some(sorted[rank - 1])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub mean: f64,
    pub std: f64,
    pub tau_max: f64,
    pub arrival_fraction: f64,
    pub arrivals: usize,
    pub censored: usize,
    pub failed: usize,
}

impl SummaryStats {
    /// Standard error of the mean.
    pub fn standard_error(&self) -> f64 {
        self.std / (self.arrivals as f64).sqrt()
    }
}

/// Moments over arrived trajectories; censored ones only lower
/// `arrival_fraction`.
pub fn summarize(result: &EnsembleResult) -> Result<SummaryStats, EnsembleError> {
    let taus = result.arrival_times();
    let mut stats = summarize_times(&taus)?;
    stats.arrival_fraction = taus.len() as f64 / result.len() as f64;
    stats.censored = result.censored_count;
    stats.failed = result.failed_count;
    Ok(stats)
}

/// Summary of bare arrival times (all counted as arrivals).
pub fn summarize_times(taus: &[f64]) -> Result<SummaryStats, EnsembleError> {
    if taus.is_empty() {
        return Err(EnsembleError::NoArrivals);
    }
    let n = taus.len() as f64;
    let mean = taus.iter().sum::<f64>() / n;
    let var = if taus.len() > 1 {
        taus.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    let tau_max = taus.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(SummaryStats {
        mean,
        std: var.sqrt(),
        tau_max,
        arrival_fraction: 1.0,
        arrivals: taus.len(),
        censored: 0,
        failed: 0,
    })
}

/// A closed time interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub start: f64,
    pub end: f64,
}

impl Window {
    pub fn width(&self) -> f64 {
        self.end - self.start
    }
}

/// Maximal runs of empty bins at least `min_width` wide that lie strictly
/// between occupied bins.
pub fn no_arrival_windows(hist: &Histogram, min_width: f64) -> Vec<Window> {
    let occupied: Vec<usize> = (0..hist.bins()).filter(|&i| hist.counts[i] > 0).collect();
    let mut windows = Vec::new();
    for pair in occupied.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if b > a + 1 {
            let w = Window {
                start: hist.bin_edges[a + 1],
                end: hist.bin_edges[b],
            };
            // tolerate rounding in the accumulated edges
            if w.width() >= min_width * (1.0 - 1e-9) {
                windows.push(w);
            }
        }
    }
    windows
}

/// Default bin width of the window search, as a fraction of `L`.
pub const WINDOW_BIN_FRACTION: f64 = 1.0 / 4000.0;
/// Default minimum window width, as a fraction of `L`.
pub const WINDOW_MIN_FRACTION: f64 = 1.0 / 1000.0;

/// No-arrival windows among the arrivals below `below`, binned at
/// `bin_width`.
pub fn windows_below(taus: &[f64], below: f64, bin_width: f64, min_width: f64) -> Vec<Window> {
    let inside: Vec<f64> = taus.iter().copied().filter(|&t| t < below).collect();
    let hist = Histogram::with_width(&inside, 0.0, below, bin_width);
    no_arrival_windows(&hist, min_width)
}

/// Boundaries of lobe `k` (1 = main lobe): `[L/((k+1) pi), L/(k pi))`, with
/// the main lobe open above.
pub fn lobe_interval(length: f64, k: u32) -> (f64, f64) {
    let lo = length / ((k + 1) as f64 * PI);
    let hi = if k == 1 { f64::INFINITY } else { length / (k as f64 * PI) };
    (lo, hi)
}

/// Arrivals falling in each of the first `max_lobes` lobes.
pub fn lobe_occupancy(taus: &[f64], length: f64, max_lobes: u32) -> Vec<usize> {
    (1..=max_lobes)
        .map(|k| {
            let (lo, hi) = lobe_interval(length, k);
            taus.iter().filter(|&&t| t >= lo && t < hi).count()
        })
        .collect()
}

/// Number of consecutive occupied lobes counting from the main lobe.
pub fn occupied_lobes(taus: &[f64], length: f64) -> u32 {
    let mut k = 0;
    loop {
        let (lo, hi) = lobe_interval(length, k + 1);
        if !taus.iter().any(|&t| t >= lo && t < hi) {
            return k;
        }
        k += 1;
    }
}

/// Expected number of the `n` arrivals falling in lobe `lobe`:
/// `(2 / pi^2) n / lobe^4`.
pub fn expected_lobe_population(n: usize, lobe: u32) -> f64 {
    assert!(lobe >= 1, "lobes are numbered from 1");
    2.0 / (PI * PI) * n as f64 / (lobe as f64).powi(4)
}

/// Largest `n` with `delta_tau < L / (pi n^2)` (dimensionless); 0 when even
/// the main lobe is narrower than the resolution.
pub fn resolvable_lobes_dimensionless(delta_tau: f64, length: f64) -> u32 {
    assert!(delta_tau > 0.0, "time resolution must be positive");
    let bound = |n: u32| length / (PI * (n as f64).powi(2));
    let mut n = (length / (PI * delta_tau)).sqrt().floor() as u32;
    while n >= 1 && delta_tau >= bound(n) {
        n -= 1;
    }
    while delta_tau < bound(n + 1) {
        n += 1;
    }
    n
}

/// [`resolvable_lobes_dimensionless`] for a detector resolution in seconds.
pub fn resolvable_lobes(delta_t_seconds: f64, length: f64, units: &UnitSystem) -> u32 {
    resolvable_lobes_dimensionless(units.from_physical_time(delta_t_seconds), length)
}
