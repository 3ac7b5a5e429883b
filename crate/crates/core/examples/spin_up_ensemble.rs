//! A spin-up ensemble against the flux distribution: Bohmian arrival times
//! and the integrated flux should describe the same law.
//!
//!     cargo run --release --example spin_up_ensemble [n]

use spinarrival::dynamics::SolverConfig;
use spinarrival::ensemble::{run_ensemble, summarize};
use spinarrival::reference::flux_cdf;
use spinarrival::stats::{ks_critical_one_sample, ks_one_sample_censored};
use spinarrival::{SpinOrientation, WaveguideParams};

fn main() {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2000);
    let params = WaveguideParams::new(100.0, 1000.0).unwrap();
    let solver = SolverConfig::for_length(params.length);
    let result = run_ensemble(n, SpinOrientation::up(), params, &solver, 1, None).unwrap();
    let stats = summarize(&result).unwrap();
    println!(
        "n = {n}: mean {:.4} +- {:.4}, std {:.4}, tau_max {:.3}, arrived {:.5}",
        stats.mean,
        stats.standard_error(),
        stats.std,
        stats.tau_max,
        stats.arrival_fraction
    );

    let mut taus = result.arrival_times();
    taus.sort_by(f64::total_cmp);
    let mut grid = taus.clone();
    grid.push(solver.t_max);
    let cdf = flux_cdf(&grid, params.length).unwrap();
    let d = ks_one_sample_censored(&cdf[..taus.len()], n, cdf[taus.len()]);
    println!("KS distance to the flux CDF: {d:.5} (1% critical value {:.5})", ks_critical_one_sample(n));
}
