//! Experiment configuration files (TOML).
//!
//! Physics parameters (`alpha`, `length`, `omega`, `n`, `seed`) have no
//! defaults. Solver, histogram, curve-grid and output settings do, and the
//! resolved values are echoed into every summary so a run can be repeated
//! from its own output.

use crate::dynamics::SolverConfig;
use crate::ensemble::{WINDOW_BIN_FRACTION, WINDOW_MIN_FRACTION};
use crate::state::{SpinOrientation, StateError, UnitSystem, WaveguideParams};
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed configuration: {0}")]
    Parse(String),
    #[error(transparent)]
    State(#[from] StateError),
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpinSection {
    pub alpha: f64,
    #[serde(default)]
    pub beta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleSection {
    pub n: usize,
    pub seed: u64,
}

/// Solver overrides; anything left out takes the library default for the
/// configured detector distance.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rel_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub abs_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub crossing_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_steps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_start: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub track_crossings_until: Option<f64>,
}

impl SolverSection {
    pub fn resolve(&self, length: f64) -> SolverConfig {
        let d = SolverConfig::for_length(length);
        SolverConfig {
            rel_tol: self.rel_tol.unwrap_or(d.rel_tol),
            abs_tol: self.abs_tol.unwrap_or(d.abs_tol),
            t_max: self.t_max.unwrap_or(d.t_max),
            crossing_tol: self.crossing_tol.unwrap_or(d.crossing_tol),
            max_steps: self.max_steps.unwrap_or(d.max_steps),
            t_start: self.t_start.unwrap_or(d.t_start),
            track_crossings_until: self.track_crossings_until,
        }
    }

    /// Every field filled in, as used for `length`.
    pub fn explicit(cfg: &SolverConfig) -> Self {
        SolverSection {
            rel_tol: Some(cfg.rel_tol),
            abs_tol: Some(cfg.abs_tol),
            t_max: Some(cfg.t_max),
            crossing_tol: Some(cfg.crossing_tol),
            max_steps: Some(cfg.max_steps),
            t_start: Some(cfg.t_start),
            track_crossings_until: cfg.track_crossings_until,
        }
    }
}

/// Either a bin count or a bin width; neither means the default binning.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HistogramSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bins: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bin_width: Option<f64>,
}

/// No-arrival window search.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowsSection {
    /// Minimum reported window width; default `L / 1000`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_width: Option<f64>,
    /// Bin width of the dedicated window histogram; default `L / 4000`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bin_width: Option<f64>,
    /// Upper end of the searched range; default `L / 2 pi`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub below: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    #[default]
    Log,
    Linear,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurvesSection {
    pub tau_min: f64,
    pub tau_max: f64,
    pub points: usize,
    #[serde(default)]
    pub spacing: Spacing,
    /// Extra times merged into the grid.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub extra: Vec<f64>,
}

impl CurvesSection {
    pub fn default_for(length: f64) -> Self {
        CurvesSection {
            tau_min: length * 1e-4,
            tau_max: 5.0 * length,
            points: 2000,
            spacing: Spacing::Log,
            extra: vec![length / PI],
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.tau_min > 0.0 && self.tau_max > self.tau_min && self.tau_max.is_finite()) {
            return Err(invalid(format!(
                "curve grid needs 0 < tau_min < tau_max, got [{}, {}]",
                self.tau_min, self.tau_max
            )));
        }
        if self.points < 2 {
            return Err(invalid("curve grid needs at least 2 points"));
        }
        if let Some(bad) = self.extra.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
            return Err(invalid(format!("extra curve time {bad} must be positive")));
        }
        Ok(())
    }

    /// Sorted, deduplicated grid.
    pub fn grid(&self) -> Vec<f64> {
        let mut g = match self.spacing {
            Spacing::Log => crate::reference::log_grid(self.tau_min, self.tau_max, self.points),
            Spacing::Linear => crate::reference::linear_grid(self.tau_min, self.tau_max, self.points),
        };
        g.extend_from_slice(&self.extra);
        g.sort_by(f64::total_cmp);
        g.dedup();
        g
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    Alpha,
    Length,
    Omega,
}

impl SweepParameter {
    pub fn name(self) -> &'static str {
        match self {
            SweepParameter::Alpha => "alpha",
            SweepParameter::Length => "length",
            SweepParameter::Omega => "omega",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_arrivals")]
    pub arrivals: String,
    #[serde(default = "default_histogram")]
    pub histogram: String,
    #[serde(default = "default_summary")]
    pub summary: String,
    #[serde(default = "default_curves")]
    pub curves: String,
    #[serde(default = "default_sweep")]
    pub sweep: String,
}

fn default_arrivals() -> String {
    "arrivals.csv".into()
}
fn default_histogram() -> String {
    "histogram.csv".into()
}
fn default_summary() -> String {
    "summary.toml".into()
}
fn default_curves() -> String {
    "curves.csv".into()
}
fn default_sweep() -> String {
    "sweep.csv".into()
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            arrivals: default_arrivals(),
            histogram: default_histogram(),
            summary: default_summary(),
            curves: default_curves(),
            sweep: default_sweep(),
        }
    }
}

impl OutputSection {
    fn validate(&self) -> Result<(), ConfigError> {
        for name in [&self.arrivals, &self.histogram, &self.summary, &self.curves, &self.sweep] {
            let p = Path::new(name);
            if name.is_empty() || p.is_absolute() || p.components().count() != 1 {
                return Err(invalid(format!(
                    "output name {name:?} must be a plain file name inside the output directory"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub spin: SpinSection,
    pub waveguide: WaveguideParams,
    pub ensemble: EnsembleSection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub histogram: HistogramSection,
    #[serde(default)]
    pub windows: WindowsSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curves: Option<CurvesSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub units: Option<UnitSystem>,
    #[serde(default)]
    pub output: OutputSection,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration always serialises")
    }

    pub fn spin(&self) -> SpinOrientation {
        SpinOrientation {
            alpha: self.spin.alpha,
            beta: self.spin.beta,
        }
    }

    pub fn solver_config(&self) -> SolverConfig {
        self.solver.resolve(self.waveguide.length)
    }

    pub fn curves_or_default(&self) -> CurvesSection {
        self.curves
            .clone()
            .unwrap_or_else(|| CurvesSection::default_for(self.waveguide.length))
    }

    /// The configuration with one swept parameter replaced.
    pub fn with_parameter(&self, parameter: SweepParameter, value: f64) -> Self {
        let mut c = self.clone();
        match parameter {
            SweepParameter::Alpha => c.spin.alpha = value,
            SweepParameter::Length => c.waveguide.length = value,
            SweepParameter::Omega => c.waveguide.omega = value,
        }
        c
    }

    /// Resolved `(below, bin_width, min_width)` of the window search.
    pub fn window_settings(&self) -> (f64, f64, f64) {
        let length = self.waveguide.length;
        let below = self.windows.below.unwrap_or(length / TAU);
        let bin_width = self.windows.bin_width.unwrap_or(length * WINDOW_BIN_FRACTION);
        let min_width = self
            .windows
            .min_width
            .unwrap_or_else(|| (length * WINDOW_MIN_FRACTION).max(4.0 * bin_width));
        (below, bin_width, min_width)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.spin().validate()?;
        self.waveguide.validate()?;
        if self.ensemble.n == 0 {
            return Err(invalid("ensemble.n must be at least 1"));
        }
        self.solver_config()
            .validate(&self.waveguide)
            .map_err(|e| invalid(e.to_string()))?;
        match (self.histogram.bins, self.histogram.bin_width) {
            (Some(_), Some(_)) => return Err(invalid("histogram takes either bins or bin_width, not both")),
            (Some(0), None) => return Err(invalid("histogram.bins must be at least 1")),
            (None, Some(w)) if !(w > 0.0 && w.is_finite()) => {
                return Err(invalid(format!("histogram.bin_width must be positive, got {w}")))
            }
            _ => {}
        }
        for (name, v) in [
            ("windows.min_width", self.windows.min_width),
            ("windows.bin_width", self.windows.bin_width),
            ("windows.below", self.windows.below),
        ] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(invalid(format!("{name} must be positive, got {v}")));
                }
            }
        }
        let (_, bin_width, min_width) = self.window_settings();
        if bin_width > 0.25 * min_width {
            return Err(invalid(format!(
                "windows.bin_width = {bin_width} must be at most a quarter of min_width = {min_width}"
            )));
        }
        if let Some(curves) = &self.curves {
            curves.validate()?;
        }
        if let Some(units) = &self.units {
            units.validate()?;
        }
        if let Some(sweep) = &self.sweep {
            if sweep.values.is_empty() {
                return Err(invalid("sweep.values must not be empty"));
            }
            for &v in &sweep.values {
                let c = self.with_parameter(sweep.parameter, v);
                c.spin().validate()?;
                c.waveguide.validate()?;
                if self.solver.t_max.is_some() {
                    c.solver_config()
                        .validate(&c.waveguide)
                        .map_err(|e| invalid(format!("sweep value {v}: {e}")))?;
                }
            }
        }
        self.output.validate()
    }
}
