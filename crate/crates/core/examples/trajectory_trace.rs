//! One trajectory per spin orientation from the same starting point, printed
//! along the way. Spin-up circles the axis at the trap frequency; up-down
//! keeps x fixed and drifts in y.
//!
//!     cargo run --release --example trajectory_trace

use spinarrival::dynamics::{trace_trajectory, Outcome, SolverConfig};
use spinarrival::{Position3, SpinOrientation, WaveguideParams};

fn main() {
    let params = WaveguideParams::new(10.0, 100.0).unwrap();
    let start = Position3::new(0.05, -0.03, 0.6);
    let cfg = SolverConfig {
        track_crossings_until: Some(60.0),
        ..SolverConfig::for_length(params.length)
    };
    for (name, spin) in [("up", SpinOrientation::up()), ("up-down", SpinOrientation::up_down())] {
        let mut path = Vec::new();
        let rec = trace_trajectory(start, spin, params, &cfg, |s| path.push(s)).unwrap();
        println!("{name}: {} samples", path.len());
        let stride = (path.len() / 12).max(1);
        for s in path.iter().step_by(stride) {
            let p = s.position;
            println!("  t = {:9.5}  x = {:+.5}  y = {:+.5}  z = {:8.4}", s.t, p.x, p.y, p.z);
        }
        match rec.outcome {
            Outcome::Arrived { tau, crossings } => println!("  arrives at tau = {tau:.9}, {crossings} crossing(s) by t = 60"),
            Outcome::Censored => println!("  no arrival before t_max"),
        }
    }
}
