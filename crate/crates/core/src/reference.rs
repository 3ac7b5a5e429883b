//! Closed-form comparison curves: the quantum-flux arrival density, its
//! asymptotic forms, and the semiclassical time-of-flight density.

use crate::propagator::axial_field;
use crate::quadrature::{integrate, Tolerance};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReferenceError {
    #[error("time must be positive, got {0}")]
    NonPositiveTime(f64),
    #[error("lobe approximation needs tau < L/10 = {limit}, got {tau}")]
    LobeRange { tau: f64, limit: f64 },
    #[error("invalid time grid: {0}")]
    Grid(String),
}

/// Quantum (convective) flux through `z = L`, `2 Im[conj(W) W']`. Returned
/// as computed, without clamping; zero for `tau <= 0`.
pub fn flux_density(tau: f64, length: f64) -> f64 {
    match axial_field(length, tau) {
        Ok(v) => 2.0 * v.current(),
        Err(_) => 0.0,
    }
}

/// Main-lobe tail `4 (L/pi)^3 / tau^4`.
pub fn flux_tail(tau: f64, length: f64) -> f64 {
    4.0 * (length / PI).powi(3) / tau.powi(4)
}

/// `sin(x)/x`, by its Taylor series close to the origin.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Short-time lobe train `(4 pi / L) sinc^2(L/tau)`, valid for `tau < L/10`.
pub fn flux_lobe_approx(tau: f64, length: f64) -> Result<f64, ReferenceError> {
    let limit = length / 10.0;
    if tau <= 0.0 {
        return Err(ReferenceError::NonPositiveTime(tau));
    }
    if tau >= limit {
        return Err(ReferenceError::LobeRange { tau, limit });
    }
    Ok(4.0 * PI / length * sinc(length / tau).powi(2))
}

/// Semiclassical density `(8 pi L / tau^2) cos^2(L/2tau) / ((L/tau)^2 - pi^2)^2`.
///
/// With `u = L/tau` and `u = pi + d`, `cos(u/2) = -sin(d/2)`, so the density
/// is `(8 pi / L) u^2 sinc^2(d/2) / (4 (u + pi)^2)`, regular at `tau = L/pi`.
pub fn semiclassical_density(tau: f64, length: f64) -> f64 {
    if tau <= 0.0 {
        return 0.0;
    }
    let u = length / tau;
    let s = sinc(0.5 * (u - PI));
    2.0 * PI / length * (u * s / (u + PI)).powi(2)
}

/// `int_0^tau` of the flux at each of the increasing `taus`, accumulated
/// interval by interval with adaptive Gauss-Kronrod.
pub fn flux_cdf(taus: &[f64], length: f64) -> Result<Vec<f64>, ReferenceError> {
    check_grid(taus, false)?;
    let tol = Tolerance::new(1e-14, 1e-10);
    let mut acc = 0.0;
    let mut prev = 0.0;
    let mut out = Vec::with_capacity(taus.len());
    for &t in taus {
        if t > prev {
            acc += integrate(|s: f64| flux_density(s, length), prev, t, tol).value;
            prev = t;
        }
        out.push(acc);
    }
    Ok(out)
}

fn check_grid(taus: &[f64], strict: bool) -> Result<(), ReferenceError> {
    if taus.is_empty() {
        return Err(ReferenceError::Grid("empty".into()));
    }
    if let Some(bad) = taus.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
        return Err(ReferenceError::Grid(format!("non-positive or non-finite time {bad}")));
    }
    for pair in taus.windows(2) {
        let ordered = if strict { pair[1] > pair[0] } else { pair[1] >= pair[0] };
        if !ordered {
            return Err(ReferenceError::Grid(format!(
                "times not increasing at {} -> {}",
                pair[0], pair[1]
            )));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveKind {
    Flux,
    FluxTail,
    FluxLobes,
    Semiclassical,
}

impl CurveKind {
    pub const ALL: [CurveKind; 4] = [
        CurveKind::Flux,
        CurveKind::FluxTail,
        CurveKind::FluxLobes,
        CurveKind::Semiclassical,
    ];

    pub fn label(self) -> &'static str {
        match self {
            CurveKind::Flux => "flux",
            CurveKind::FluxTail => "flux_tail",
            CurveKind::FluxLobes => "flux_lobes",
            CurveKind::Semiclassical => "semiclassical",
        }
    }

    /// The density at one time.
    pub fn eval(self, tau: f64, length: f64) -> Result<f64, ReferenceError> {
        if tau.is_nan() || tau <= 0.0 {
            return Err(ReferenceError::NonPositiveTime(tau));
        }
        Ok(match self {
            CurveKind::Flux => flux_density(tau, length),
            CurveKind::FluxTail => flux_tail(tau, length),
            CurveKind::FluxLobes => flux_lobe_approx(tau, length)?,
            CurveKind::Semiclassical => semiclassical_density(tau, length),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionCurve {
    pub kind: CurveKind,
    pub tau_grid: Vec<f64>,
    pub density: Vec<f64>,
}

/// Evaluates `kind` on a strictly increasing grid of positive times.
pub fn curve(kind: CurveKind, tau_grid: &[f64], length: f64) -> Result<DistributionCurve, ReferenceError> {
    check_grid(tau_grid, true)?;
    let density = tau_grid
        .iter()
        .map(|&t| kind.eval(t, length))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(DistributionCurve {
        kind,
        tau_grid: tau_grid.to_vec(),
        density,
    })
}

/// `n` logarithmically spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2 && lo > 0.0 && hi > lo, "invalid log grid");
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| match i {
            0 => lo,
            _ if i + 1 == n => hi,
            _ => (a + (b - a) * i as f64 / (n - 1) as f64).exp(),
        })
        .collect()
}

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn linear_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2 && hi > lo, "invalid linear grid");
    (0..n)
        .map(|i| if i + 1 == n { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 })
        .collect()
}
