//! Bohmian velocity field in the waveguide and first-arrival integration.
//!
//! With `Psi = psi(r, t) chi`, the guidance law reduces to
//!
//! ```text
//! vx = -sin a sin b Re[W'/W] - omega cos a y
//! vy =  sin a cos b Re[W'/W] + omega cos a x
//! vz =  Im[W'/W] + omega sin a (y cos b - x sin b)
//! ```
//!
//! which is the cylindrical system rewritten in Cartesian coordinates (smooth
//! on the axis). Trajectories are integrated in the frame co-rotating with the
//! transverse term `omega cos a`: there the equations keep the same form with
//! the rotation dropped and `b` replaced by `b - omega cos a (t - t_start)`.
//! Spin-up trajectories then have frozen transverse coordinates instead of a
//! fast rotation the step controller would have to resolve.

use crate::dopri::{DenseStep, Dopri5, StepControl, StepError};
use crate::propagator::{axial_field, AxialPoint, PropagatorError};
use crate::state::{Position3, SpinOrientation, WaveguideParams};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Censoring horizon.
    pub t_max: f64,
    /// Time resolution of the crossing refinement.
    pub crossing_tol: f64,
    pub max_steps: usize,
    /// Integration starts here; the closed form is singular at `t = 0`.
    pub t_start: f64,
    /// When set, integration continues past the first arrival up to this
    /// time and counts every further crossing of the detector plane.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub track_crossings_until: Option<f64>,
}

pub const DEFAULT_REL_TOL: f64 = 1e-8;
pub const DEFAULT_ABS_TOL: f64 = 1e-10;
pub const DEFAULT_CROSSING_TOL: f64 = 1e-9;
pub const DEFAULT_MAX_STEPS: usize = 500_000;
pub const DEFAULT_T_START: f64 = 1e-8;
/// Default horizon in units of the detector distance.
pub const DEFAULT_HORIZON_PER_LENGTH: f64 = 50.0;

/// Dense-output samples checked per step when looking for the crossing.
const CROSSING_PROBES: usize = 8;

impl SolverConfig {
    pub fn for_length(length: f64) -> Self {
        SolverConfig {
            rel_tol: DEFAULT_REL_TOL,
            abs_tol: DEFAULT_ABS_TOL,
            t_max: DEFAULT_HORIZON_PER_LENGTH * length,
            crossing_tol: DEFAULT_CROSSING_TOL,
            max_steps: DEFAULT_MAX_STEPS,
            t_start: DEFAULT_T_START,
            track_crossings_until: None,
        }
    }

    pub fn validate(&self, params: &WaveguideParams) -> Result<(), DynamicsError> {
        let positive = [
            ("rel_tol", self.rel_tol),
            ("abs_tol", self.abs_tol),
            ("t_max", self.t_max),
            ("crossing_tol", self.crossing_tol),
            ("t_start", self.t_start),
        ];
        for (name, value) in positive {
            if !(value > 0.0 && value.is_finite()) {
                return Err(DynamicsError::Config(format!("{name} must be positive, got {value}")));
            }
        }
        if self.max_steps == 0 {
            return Err(DynamicsError::Config("max_steps must be positive".into()));
        }
        let lobe_edge = params.length / std::f64::consts::TAU;
        if self.t_max <= lobe_edge {
            return Err(DynamicsError::Config(format!(
                "t_max = {} does not reach the lobe edge L/2pi = {lobe_edge}",
                self.t_max
            )));
        }
        if self.t_start >= self.t_max {
            return Err(DynamicsError::Config("t_start must precede t_max".into()));
        }
        if let Some(until) = self.track_crossings_until {
            if !(until.is_finite() && until > self.t_start) {
                return Err(DynamicsError::Config(format!(
                    "track_crossings_until = {until} must be a time after t_start"
                )));
            }
        }
        Ok(())
    }

    fn step_control(&self) -> StepControl {
        StepControl {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            max_steps: self.max_steps,
            ..StepControl::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error("invalid solver configuration: {0}")]
    Config(String),
    #[error("initial point z = {0} lies outside the trap (0, 1)")]
    OutsideSupport(f64),
    #[error(transparent)]
    Field(#[from] PropagatorError),
    #[error("step budget of {0} steps exhausted")]
    StepBudget(usize),
    #[error("node proximity persisted after {retries} step halvings: {source}")]
    NodeRetries { retries: usize, source: PropagatorError },
    #[error("step size underflow at t = {0}")]
    StepUnderflow(f64),
}

impl From<StepError<PropagatorError>> for DynamicsError {
    fn from(e: StepError<PropagatorError>) -> Self {
        match e {
            StepError::Budget(n) => DynamicsError::StepBudget(n),
            StepError::Retries { retries, source } => DynamicsError::NodeRetries { retries, source },
            StepError::Underflow(t) => DynamicsError::StepUnderflow(t),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Outcome {
    Arrived { tau: f64, crossings: u32 },
    Censored,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArrivalRecord {
    pub initial: Position3,
    pub outcome: Outcome,
}

impl ArrivalRecord {
    pub fn arrival_time(&self) -> Option<f64> {
        match self.outcome {
            Outcome::Arrived { tau, .. } => Some(tau),
            Outcome::Censored => None,
        }
    }
}

/// Lab-frame Bohmian velocity at `p`, time `t`.
pub fn velocity(
    p: Position3,
    t: f64,
    spin: SpinOrientation,
    params: WaveguideParams,
) -> Result<[f64; 3], PropagatorError> {
    let g = axial_field(p.z, t)?.log_derivative(AxialPoint { z: p.z, t })?;
    let (sa, ca) = spin.alpha.sin_cos();
    let (sb, cb) = spin.beta.sin_cos();
    let omega = params.omega;
    Ok([
        -sa * sb * g.re - omega * ca * p.y,
        sa * cb * g.re + omega * ca * p.x,
        g.im + omega * sa * (p.y * cb - p.x * sb),
    ])
}

/// Velocity field in the co-rotating frame, as integrated.
struct CorotatingField {
    sin_alpha: f64,
    beta: f64,
    spin_rate: f64,
    coupling: f64,
    t_start: f64,
}

impl CorotatingField {
    fn new(spin: SpinOrientation, params: WaveguideParams, t_start: f64) -> Self {
        let trig = spin.trig();
        CorotatingField {
            sin_alpha: trig.sin_alpha,
            beta: spin.beta,
            spin_rate: params.omega * trig.cos_alpha,
            coupling: params.omega * trig.sin_alpha,
            t_start,
        }
    }

    fn frame_angle(&self, t: f64) -> f64 {
        self.spin_rate * (t - self.t_start)
    }

    #[inline]
    fn eval(&self, t: f64, q: &[f64; 3]) -> Result<[f64; 3], PropagatorError> {
        let point = AxialPoint { z: q[2], t };
        let g = axial_field(q[2], t)?.log_derivative(point)?;
        if self.sin_alpha == 0.0 {
            return Ok([0.0, 0.0, g.im]);
        }
        let (sg, cg) = (self.beta - self.frame_angle(t)).sin_cos();
        Ok([
            -self.sin_alpha * sg * g.re,
            self.sin_alpha * cg * g.re,
            g.im + self.coupling * (q[1] * cg - q[0] * sg),
        ])
    }

    fn to_lab(&self, t: f64, q: &[f64; 3]) -> Position3 {
        Position3::new(q[0], q[1], q[2]).rotated(self.frame_angle(t))
    }
}

/// A point along an integrated trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySample {
    pub t: f64,
    pub position: Position3,
}

/// Integrates one trajectory until it first reaches `z = L` or `t_max`.
pub fn integrate_trajectory(
    initial: Position3,
    spin: SpinOrientation,
    params: WaveguideParams,
    cfg: &SolverConfig,
) -> Result<ArrivalRecord, DynamicsError> {
    trace_trajectory(initial, spin, params, cfg, |_| {})
}

/// As [`integrate_trajectory`], reporting every accepted step endpoint (lab
/// frame) to `observer`, starting with the initial point and ending with the
/// arrival point when there is one.
pub fn trace_trajectory(
    initial: Position3,
    spin: SpinOrientation,
    params: WaveguideParams,
    cfg: &SolverConfig,
    mut observer: impl FnMut(TrajectorySample),
) -> Result<ArrivalRecord, DynamicsError> {
    cfg.validate(&params)?;
    if !(initial.z > 0.0 && initial.z < 1.0) {
        return Err(DynamicsError::OutsideSupport(initial.z));
    }
    let detector = params.length;
    let field = CorotatingField::new(spin, params, cfg.t_start);
    let rhs = |t: f64, q: &[f64; 3]| field.eval(t, q);
    let q0 = [initial.x, initial.y, initial.z];
    let mut solver = Dopri5::new(rhs, cfg.t_start, q0, cfg.step_control())?;
    observer(TrajectorySample { t: cfg.t_start, position: initial });

    let end = cfg.t_max;
    while solver.time() < end {
        let step = solver.advance(end)?;
        if let Some(tau) = first_crossing(&step, detector, cfg.crossing_tol) {
            let q = step.at(tau);
            observer(TrajectorySample { t: tau, position: field.to_lab(tau, &q) });
            let mut crossings = 1;
            if let Some(until) = cfg.track_crossings_until.filter(|&u| u > tau) {
                let mut above = true;
                let from = (tau - step.t0) / step.h;
                crossings += count_sign_changes(&step, from, detector, &mut above);
                while solver.time() < until {
                    let step = solver.advance(until)?;
                    crossings += count_sign_changes(&step, 0.0, detector, &mut above);
                }
            }
            return Ok(ArrivalRecord {
                initial,
                outcome: Outcome::Arrived { tau, crossings },
            });
        }
        let q = step.end();
        observer(TrajectorySample { t: step.t1(), position: field.to_lab(step.t1(), &q) });
    }
    Ok(ArrivalRecord {
        initial,
        outcome: Outcome::Censored,
    })
}

/// Sign changes of `z - detector` at the probe points after fraction `from`
/// of the step, continuing from the side recorded in `above`.
fn count_sign_changes(step: &DenseStep<3>, from: f64, detector: f64, above: &mut bool) -> u32 {
    let mut count = 0;
    for j in 1..=CROSSING_PROBES {
        let theta = from + (1.0 - from) * j as f64 / CROSSING_PROBES as f64;
        let now = step.component_at(2, theta) >= detector;
        if now != *above {
            count += 1;
            *above = now;
        }
    }
    count
}

/// Earliest time inside `step` at which `z` reaches `detector`, refined by
/// bisection on the dense output.
fn first_crossing(step: &DenseStep<3>, detector: f64, tol: f64) -> Option<f64> {
    let mut lo = 0.0;
    let mut hit = None;
    for j in 1..=CROSSING_PROBES {
        let theta = j as f64 / CROSSING_PROBES as f64;
        if step.component_at(2, theta) >= detector {
            hit = Some(theta);
            break;
        }
        lo = theta;
    }
    let mut hi = hit?;
    let theta_tol = tol / step.h;
    while hi - lo > theta_tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if step.component_at(2, mid) >= detector {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(step.t0 + step.h * 0.5 * (lo + hi))
}
