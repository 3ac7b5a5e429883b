//! Bohmian first-arrival times of a spin-1/2 particle released from a
//! cylindrical trap into a semi-infinite waveguide.
//!
//! The axial wave function is known in closed form ([`propagator`]), so each
//! trajectory is an ODE integration of the guidance law ([`dynamics`]). An
//! ensemble of Born-distributed initial points gives the arrival-time
//! distribution ([`ensemble`]), which can be compared against the quantum-flux
//! and semiclassical curves in [`reference`].

pub mod commands;
pub mod config;
pub mod dopri;
pub mod dynamics;
pub mod ensemble;
pub mod output;
pub mod propagator;
pub mod quadrature;
pub mod reference;
pub mod special;
pub mod state;
pub mod stats;

pub use dynamics::{integrate_trajectory, velocity, ArrivalRecord, Outcome, SolverConfig};
pub use propagator::{axial_field, d_kernel, log_derivative, w_evolution, w_prime, AxialValue};
pub use special::{erfc_complex, faddeeva_w, Complex};
pub use state::{born_density, Position3, SpinOrientation, UnitSystem, WaveguideParams};
