//! How many lobes a detector with a given time resolution separates, for an
//! electron released from a 50 micron trap onto a detector 5 mm away.
//!
//!     cargo run --release --example lobe_resolution

use spinarrival::ensemble::{expected_lobe_population, resolvable_lobes};
use spinarrival::UnitSystem;

fn main() {
    let units = UnitSystem::electron(50e-6);
    let length = units.from_physical_length(5e-3);
    println!("time unit {:.4e} s, L = {length} trap lengths", units.time_unit());
    for dt in [1e-5, 1e-6, 1e-7, 1e-8] {
        println!("  resolution {dt:.0e} s: {} lobes", resolvable_lobes(dt, length, &units));
    }
    // the rounded constants give the lobe counts usually quoted
    let rounded = UnitSystem::new(50e-6, 9.11e-31, 1.05e-34).unwrap();
    println!(
        "with m = 9.11e-31 kg, hbar = 1.05e-34 J s: {} and {} lobes at 10 us and 0.1 us",
        resolvable_lobes(1e-5, length, &rounded),
        resolvable_lobes(1e-7, length, &rounded)
    );
    println!("\nexpected arrivals per lobe out of 1e5:");
    for k in 1..=10 {
        println!("  lobe {k:2}: {:10.2}", expected_lobe_population(100_000, k));
    }
}
