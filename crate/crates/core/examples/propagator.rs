//! The axial wave function after the barrier is released: profile, norm and
//! the current at a distant detector.
//!
//!     cargo run --release --example propagator

use spinarrival::quadrature::{integrate, integrate_to_infinity, Tolerance};
use spinarrival::{axial_field, w_evolution};

fn norm(t: f64) -> f64 {
    let tol = Tolerance::new(1e-12, 1e-10);
    let dens = |z: f64| w_evolution(z, t).unwrap().norm_sqr();
    let front = 1.0 + 4.0 * std::f64::consts::PI * t;
    let pieces = (4.0 * front).ceil() as usize;
    let near: f64 = (0..pieces)
        .map(|i| {
            let (a, b) = (front * i as f64 / pieces as f64, front * (i + 1) as f64 / pieces as f64);
            integrate(dens, a, b, tol).value
        })
        .sum();
    near + integrate_to_infinity(dens, front, tol).value
}

fn main() {
    for t in [1e-4, 0.05, 0.5, 2.0] {
        println!("t = {t}");
        for i in 0..=8 {
            let z = 0.5 * i as f64;
            let w = w_evolution(z, t).unwrap();
            println!("  z = {z:4.1}  |W|^2 = {:.6e}  arg W = {:+.4}", w.norm_sqr(), w.arg());
        }
    }

    println!("\nint_0^inf |W|^2 dz (1/2 for all t):");
    for t in [0.1, 1.0, 10.0] {
        println!("  t = {t:5.1}: {:.12}", norm(t));
    }

    println!("\nIm(conj W W') at z = 100:");
    for t in [1.0, 5.0, 15.0, 40.0, 100.0] {
        println!("  t = {t:6.1}: {:.6e}", axial_field(100.0, t).unwrap().current());
    }
}
