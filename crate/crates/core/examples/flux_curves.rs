//! Flux and semiclassical arrival densities for a detector at L = 100, with
//! the short-time lobe train and the main-lobe tail.
//!
//!     cargo run --release --example flux_curves

use spinarrival::reference::{flux_cdf, log_grid, CurveKind};
use std::f64::consts::PI;

fn main() {
    let length = 100.0;
    println!("{:>10} {:>14} {:>14} {:>14} {:>14}", "tau", "flux", "flux_tail", "flux_lobes", "semiclassical");
    for tau in log_grid(1.0, 500.0, 25) {
        let cell = |k: CurveKind| k.eval(tau, length).map_or("-".to_string(), |v| format!("{v:.6e}"));
        println!(
            "{tau:10.4} {:>14} {:>14} {:>14} {:>14}",
            cell(CurveKind::Flux),
            cell(CurveKind::FluxTail),
            cell(CurveKind::FluxLobes),
            cell(CurveKind::Semiclassical)
        );
    }

    let marks = [length / (2.0 * PI), length / PI, 100.0, 500.0];
    let cdf = flux_cdf(&marks, length).unwrap();
    println!();
    for (t, c) in marks.iter().zip(cdf) {
        println!("probability arrived by tau = {t:8.3}: {c:.6}");
    }
}
