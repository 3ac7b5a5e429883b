//! Closed-form axial wave function after the barrier is released.
//!
//! The axial factor `W(z, t)` is the free evolution of `sin(pi z)` on `(0, 1)`
//! with a hard wall at `z = 0`. By the image construction it equals the free
//! evolution of `sin(pi z)` on `(-1, 1)`, and each plane-wave half-line piece
//! `exp(ikx) theta(x)` of that datum evolves into a Moshinsky function
//!
//! ```text
//! M_k(x, t) = 1/2 exp(ikx - ik^2 t/2) erfc(-(x - kt) e^{-i pi/4} / sqrt(2t))
//! ```
//!
//! Writing the `erfc` through the Faddeeva function puts every argument on the
//! ray `|s| e^{i pi/4}`, `s = (x - kt)/sqrt(2t)`, where `w` is bounded:
//!
//! ```text
//! M_k = H(s) exp(ikx - ik^2 t/2) + sgn(-s) 1/2 exp(ix^2/2t) w(|s| e^{i pi/4})
//! ```
//!
//! The plane-wave remainders `H(s) ...` of the four pieces collapse to integer
//! coefficients, so the cancellation between them beyond the ballistic front is
//! exact rather than numerical.

use crate::special::{faddeeva_w, Complex};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum PropagatorError {
    #[error("evolution time must be positive, got {0}")]
    NonPositiveTime(f64),
    #[error("|W| = {modulus:e} at z = {z}, t = {t} is below the node floor")]
    NodeProximity { z: f64, t: f64, modulus: f64 },
}

/// `W(z, t)` together with its axial derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxialValue {
    pub w: Complex,
    pub dw: Complex,
}

/// A point of the axial problem in dimensionless units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxialPoint {
    pub z: f64,
    pub t: f64,
}

/// Relative floor on `|W|` below which the log-derivative is refused.
pub const NODE_FLOOR: f64 = 1e-13;

fn check_time(t: f64) -> Result<(), PropagatorError> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(PropagatorError::NonPositiveTime(t))
    }
}

/// The error-function part of `M_k(x, t)` and whether the plane-wave
/// remainder is switched on.
#[inline]
fn moshinsky_tail(x: f64, k: f64, t: f64) -> (Complex, bool) {
    let s = (x - k * t) / (2.0 * t).sqrt();
    let ray = Complex::from_polar(s.abs(), FRAC_PI_4);
    let half_chirp = Complex::from_polar(0.5, x * x / (2.0 * t));
    let tail = half_chirp * faddeeva_w(ray);
    if s > 0.0 {
        (-tail, true)
    } else {
        (tail, false)
    }
}

fn moshinsky(x: f64, k: f64, t: f64) -> Complex {
    let (tail, lit) = moshinsky_tail(x, k, t);
    if lit {
        tail + Complex::from_polar(1.0, k * x - 0.5 * k * k * t)
    } else {
        tail
    }
}

/// The kernel `D(x, t)`: half the free evolution of `sin(pi x) theta(x)`.
pub fn d_kernel(x: f64, t: f64) -> Result<Complex, PropagatorError> {
    check_time(t)?;
    let diff = moshinsky(x, PI, t) - moshinsky(x, -PI, t);
    Ok(diff / Complex::new(0.0, 4.0))
}

/// Evaluates `W` and `dW/dz` in one pass over the four Moshinsky pieces.
///
/// `W(z, t) = 0` for `z <= 0`; at `z = 0` the derivative is the one-sided
/// limit from inside the guide.
pub fn axial_field(z: f64, t: f64) -> Result<AxialValue, PropagatorError> {
    check_time(t)?;
    // sum over (sigma, a) of sigma * eps_a * Q and eps_a * Q, where the image
    // offset a = +1 carries eps = +1 and a = -1 carries eps = -1
    let mut w_sum = Complex::new(0.0, 0.0);
    let mut dw_sum = Complex::new(0.0, 0.0);
    let mut plane = [0i32; 2];
    for (slot, sigma) in [(0usize, 1.0f64), (1, -1.0)] {
        let k = sigma * PI;
        for (a, eps) in [(1.0f64, 1.0f64), (-1.0, -1.0)] {
            let (tail, lit) = moshinsky_tail(z - a, k, t);
            w_sum += tail * (sigma * eps);
            dw_sum += tail * eps;
            if lit {
                plane[slot] += eps as i32;
            }
        }
    }
    let mut w = w_sum / Complex::new(0.0, 2.0);
    let mut dw = dw_sum * FRAC_PI_2;
    if plane != [0, 0] {
        let carrier = Complex::from_polar(1.0, -0.5 * PI * PI * t);
        let up = Complex::from_polar(1.0, PI * z) * plane[0] as f64;
        let down = Complex::from_polar(1.0, -PI * z) * plane[1] as f64;
        w -= carrier * (up - down) / Complex::new(0.0, 2.0);
        dw -= carrier * (up + down) * FRAC_PI_2;
    }
    if z <= 0.0 {
        w = Complex::new(0.0, 0.0);
        if z < 0.0 {
            dw = Complex::new(0.0, 0.0);
        }
    }
    Ok(AxialValue { w, dw })
}

/// The time evolution integral `W(z, t)`.
pub fn w_evolution(z: f64, t: f64) -> Result<Complex, PropagatorError> {
    axial_field(z, t).map(|v| v.w)
}

/// `dW/dz`, assembled analytically. The Gaussian contributions of the four
/// kernels cancel in pairs, leaving `pi/2` times the signed Moshinsky sum.
pub fn w_prime(z: f64, t: f64) -> Result<Complex, PropagatorError> {
    axial_field(z, t).map(|v| v.dw)
}

impl AxialValue {
    /// `W'/W`, refused near a node of `W`.
    pub fn log_derivative(&self, point: AxialPoint) -> Result<Complex, PropagatorError> {
        let modulus = self.w.norm();
        if modulus < NODE_FLOOR * self.dw.norm().max(1.0) {
            return Err(PropagatorError::NodeProximity {
                z: point.z,
                t: point.t,
                modulus,
            });
        }
        Ok(self.dw / self.w)
    }

    /// Axial probability current `Im(conj(W) W')`.
    pub fn current(&self) -> f64 {
        (self.w.conj() * self.dw).im
    }
}

/// `W'(z, t) / W(z, t)`; the ratio drives all three components of the
/// Bohmian velocity.
pub fn log_derivative(z: f64, t: f64) -> Result<Complex, PropagatorError> {
    axial_field(z, t)?.log_derivative(AxialPoint { z, t })
}
