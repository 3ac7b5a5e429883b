//! Mean, spread and largest arrival time against the spin angle alpha at
//! L = 10. The curve is symmetric about pi/2 and dips there.
//!
//!     cargo run --release --example alpha_sweep [n]

use spinarrival::dynamics::SolverConfig;
use spinarrival::ensemble::{derive_seed, run_ensemble, summarize};
use spinarrival::{SpinOrientation, WaveguideParams};
use std::f64::consts::PI;

fn main() {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(500);
    let params = WaveguideParams::new(10.0, 100.0).unwrap();
    let solver = SolverConfig::for_length(params.length);
    println!("{:>8} {:>10} {:>10} {:>10} {:>10}", "alpha", "mean", "stderr", "std", "tau_max");
    for i in 0..=8u64 {
        let alpha = PI * i as f64 / 8.0;
        let spin = SpinOrientation::new(alpha, 0.0).unwrap();
        let r = run_ensemble(n, spin, params, &solver, derive_seed(3, i), None).unwrap();
        let s = summarize(&r).unwrap();
        println!("{alpha:8.4} {:10.4} {:10.4} {:10.4} {:10.4}", s.mean, s.standard_error(), s.std, s.tau_max);
    }
}
