//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use spinarrival::quadrature::{integrate, integrate_to_infinity, Tolerance};
use spinarrival::Complex;
use std::f64::consts::PI;

/// Free propagator `(2 pi i t)^{-1/2} exp(i x^2 / 2t)`.
pub fn free_kernel(x: f64, t: f64) -> Complex {
    let prefactor = Complex::new(0.0, 2.0 * PI * t).sqrt().inv();
    prefactor * Complex::from_polar(1.0, x * x / (2.0 * t))
}

/// `W(z, t)` by quadrature of the Dirichlet (image-charge) propagator over
/// the initial support `[0, 1]`. The window is split so that no panel holds
/// more than a few oscillations of the kernel phase.
pub fn w_quadrature(z: f64, t: f64) -> Complex {
    let f = |y: f64| (free_kernel(z - y, t) - free_kernel(z + y, t)) * (PI * y).sin();
    // phase speed |d/dy (z+y)^2/2t| <= (z+1)/t
    let panels = (((z + 1.0) / t) / (2.0 * PI)).ceil().clamp(1.0, 4000.0) as usize;
    let tol = Tolerance::new(1e-15, 1e-12);
    (0..panels)
        .map(|i| {
            let a = i as f64 / panels as f64;
            let b = (i + 1) as f64 / panels as f64;
            integrate(f, a, b, tol).value
        })
        .fold(Complex::new(0.0, 0.0), |acc, v| acc + v)
}

/// `int_0^inf |W(z, t)|^2 dz`; the tail beyond the front decays only as a
/// power of `z`, so the far part goes through the infinite-range map.
pub fn norm_quadrature(t: f64) -> f64 {
    let tol = Tolerance::new(1e-12, 1e-11);
    let dens = |z: f64| spinarrival::w_evolution(z, t).unwrap().norm_sqr();
    let front = 1.0 + 4.0 * PI * t + 10.0 * t.sqrt();
    let pieces = ((front / 0.25).ceil() as usize).max(4);
    let mut total = 0.0;
    for i in 0..pieces {
        let a = front * i as f64 / pieces as f64;
        let b = front * (i + 1) as f64 / pieces as f64;
        total += integrate(dens, a, b, tol).value;
    }
    total + integrate_to_infinity(dens, front, tol).value
}

/// `erfc(x)` for real `x` from `(2/sqrt(pi)) int_x^inf exp(-s^2) ds`.
pub fn erfc_real(x: f64) -> f64 {
    let tol = Tolerance::new(1e-300, 1e-14);
    let g = |s: f64| (-s * s).exp();
    if x >= 0.0 {
        2.0 / PI.sqrt() * integrate_to_infinity(g, x, tol).value
    } else {
        2.0 - erfc_real(-x)
    }
}

/// `n` log-spaced points on `[lo, hi]`.
pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
        .collect()
}
