//! The up-down state: arrivals stop at a finite time and the lobe train below
//! L/2pi is cut by empty windows.
//!
//!     cargo run --release --example up_down_pinch_off [n]

use spinarrival::dynamics::SolverConfig;
use spinarrival::ensemble::{
    expected_lobe_population, lobe_occupancy, occupied_lobes, run_ensemble, summarize, windows_below,
    WINDOW_BIN_FRACTION, WINDOW_MIN_FRACTION,
};
use spinarrival::{SpinOrientation, WaveguideParams};
use std::f64::consts::PI;

fn main() {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(5000);
    let params = WaveguideParams::new(100.0, 1000.0).unwrap();
    let result = run_ensemble(n, SpinOrientation::up_down(), params, &SolverConfig::for_length(100.0), 2, None).unwrap();
    let stats = summarize(&result).unwrap();
    println!("n = {n}: mean {:.3}, std {:.3}, tau_max {:.3}", stats.mean, stats.std, stats.tau_max);

    let taus = result.arrival_times();
    let l = params.length;
    let windows = windows_below(&taus, l / (2.0 * PI), l * WINDOW_BIN_FRACTION, l * WINDOW_MIN_FRACTION);
    println!("{} empty windows below L/2pi:", windows.len());
    for w in &windows {
        println!("  [{:.4}, {:.4}]", w.start, w.end);
    }
    println!("occupied lobes: {}", occupied_lobes(&taus, l));
    for (k, count) in lobe_occupancy(&taus, l, 6).into_iter().enumerate() {
        let k = k as u32 + 1;
        println!("  lobe {k}: {count:6} arrivals ({:.1} for a spin-up run)", expected_lobe_population(n, k));
    }
}
