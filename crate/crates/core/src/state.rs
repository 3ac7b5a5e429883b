//! Initial state, spin orientation and the unit system.
//!
//! Everything inside the crate is dimensionless: lengths in units of the trap
//! length `d`, times in `m d^2 / hbar`, frequencies in `hbar / (m d^2)`.
//! [`UnitSystem`] converts at the boundary.

use crate::special::Complex;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StateError {
    #[error("alpha = {0} is outside [0, pi]")]
    Alpha(f64),
    #[error("beta = {0} is outside [0, 2 pi)")]
    Beta(f64),
    #[error("detector distance L = {0} must exceed the trap length 1")]
    Length(f64),
    #[error("trap frequency omega = {0} must be positive")]
    Omega(f64),
    #[error("unit constant {name} = {value} must be positive")]
    Unit { name: &'static str, value: f64 },
}

/// Bloch angles of the spinor `(cos(alpha/2), sin(alpha/2) e^{i beta})`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpinOrientation {
    pub alpha: f64,
    pub beta: f64,
}

impl SpinOrientation {
    pub fn new(alpha: f64, beta: f64) -> Result<Self, StateError> {
        let s = SpinOrientation { alpha, beta };
        s.validate()?;
        Ok(s)
    }

    pub fn up() -> Self {
        SpinOrientation { alpha: 0.0, beta: 0.0 }
    }

    pub fn down() -> Self {
        SpinOrientation { alpha: PI, beta: 0.0 }
    }

    /// Equal superposition of up and down, `alpha = pi/2`, `beta = 0`.
    pub fn up_down() -> Self {
        SpinOrientation { alpha: PI / 2.0, beta: 0.0 }
    }

    pub fn validate(&self) -> Result<(), StateError> {
        if !(0.0..=PI).contains(&self.alpha) {
            return Err(StateError::Alpha(self.alpha));
        }
        if !(0.0..TAU).contains(&self.beta) {
            return Err(StateError::Beta(self.beta));
        }
        Ok(())
    }

    pub fn spinor(&self) -> [Complex; 2] {
        let half = 0.5 * self.alpha;
        [
            Complex::new(half.cos(), 0.0),
            Complex::from_polar(half.sin(), self.beta),
        ]
    }

    /// `s = (sin a cos b, sin a sin b, cos a) / 2`.
    pub fn spin_vector(&self) -> [f64; 3] {
        let (sa, ca) = self.alpha.sin_cos();
        let (sb, cb) = self.beta.sin_cos();
        [0.5 * sa * cb, 0.5 * sa * sb, 0.5 * ca]
    }

    /// Trigonometric factors used by the velocity field.
    pub(crate) fn trig(&self) -> SpinTrig {
        let (sin_alpha, cos_alpha) = self.alpha.sin_cos();
        SpinTrig { sin_alpha, cos_alpha }
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct SpinTrig {
    pub sin_alpha: f64,
    pub cos_alpha: f64,
}

/// Expectation `chi^dagger sigma chi` of the Pauli matrices.
pub fn pauli_expectation(chi: &[Complex; 2]) -> [f64; 3] {
    let [u, d] = *chi;
    let cross = u.conj() * d;
    [
        2.0 * cross.re,
        2.0 * cross.im,
        u.norm_sqr() - d.norm_sqr(),
    ]
}

/// `spin_vector` as a free function.
pub fn spin_vector(s: SpinOrientation) -> [f64; 3] {
    s.spin_vector()
}

/// Detector distance `length` and transverse trap frequency `omega`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveguideParams {
    pub length: f64,
    pub omega: f64,
}

impl WaveguideParams {
    pub fn new(length: f64, omega: f64) -> Result<Self, StateError> {
        let p = WaveguideParams { length, omega };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), StateError> {
        if !(self.length > 1.0 && self.length.is_finite()) {
            return Err(StateError::Length(self.length));
        }
        if !(self.omega > 0.0 && self.omega.is_finite()) {
            return Err(StateError::Omega(self.omega));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Position3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Position3 {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Position3 { x, y, z }
    }

    pub fn radius(&self) -> f64 {
        self.x.hypot(self.y)
    }

    /// Rotation by `angle` about the guide axis.
    pub fn rotated(&self, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Position3 {
            x: c * self.x - s * self.y,
            y: s * self.x + c * self.y,
            z: self.z,
        }
    }
}

/// `|Psi_0|^2` at `p`; the spinor drops out.
pub fn born_density(p: Position3, params: WaveguideParams) -> f64 {
    if !(p.z > 0.0 && p.z < 1.0) {
        return 0.0;
    }
    let omega = params.omega;
    let axial = (PI * p.z).sin();
    2.0 * omega / PI * axial * axial * (-omega * (p.x * p.x + p.y * p.y)).exp()
}

/// Reduced Planck constant, J s (CODATA 2018).
pub const HBAR_SI: f64 = 1.054_571_817e-34;
/// Electron mass, kg (CODATA 2018).
pub const ELECTRON_MASS_KG: f64 = 9.109_383_701_5e-31;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnitSystem {
    pub d_meters: f64,
    pub mass_kg: f64,
    #[serde(default = "default_hbar")]
    pub hbar_js: f64,
}

fn default_hbar() -> f64 {
    HBAR_SI
}

impl UnitSystem {
    pub fn new(d_meters: f64, mass_kg: f64, hbar_js: f64) -> Result<Self, StateError> {
        let u = UnitSystem { d_meters, mass_kg, hbar_js };
        u.validate()?;
        Ok(u)
    }

    /// An electron in a trap of length `d_meters`.
    pub fn electron(d_meters: f64) -> Self {
        UnitSystem {
            d_meters,
            mass_kg: ELECTRON_MASS_KG,
            hbar_js: HBAR_SI,
        }
    }

    pub fn validate(&self) -> Result<(), StateError> {
        for (name, value) in [
            ("d_meters", self.d_meters),
            ("mass_kg", self.mass_kg),
            ("hbar_js", self.hbar_js),
        ] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(StateError::Unit { name, value });
            }
        }
        Ok(())
    }

    /// Seconds per dimensionless time unit, `m d^2 / hbar`.
    pub fn time_unit(&self) -> f64 {
        self.mass_kg * self.d_meters * self.d_meters / self.hbar_js
    }

    pub fn to_physical_time(&self, tau: f64) -> f64 {
        tau * self.time_unit()
    }

    pub fn from_physical_time(&self, seconds: f64) -> f64 {
        seconds / self.time_unit()
    }

    /// rad/s for a dimensionless angular frequency.
    pub fn to_physical_frequency(&self, omega: f64) -> f64 {
        omega / self.time_unit()
    }

    pub fn from_physical_frequency(&self, rad_per_s: f64) -> f64 {
        rad_per_s * self.time_unit()
    }

    pub fn to_physical_length(&self, length: f64) -> f64 {
        length * self.d_meters
    }

    pub fn from_physical_length(&self, meters: f64) -> f64 {
        meters / self.d_meters
    }
}
