//! Simulation library for a driven microwave resonator optomechanically coupled
//! to a nanomechanical membrane, with the membrane additionally coupled to a
//! second resonator through a dispersively eliminated superconducting qubit.
//!
//! The library works entirely with the classical mean fields and linearized
//! Gaussian fluctuations of the three-mode system:
//!
//! * [`model`] — parameters, unit conventions, derived quantities;
//! * [`steady_state`] — mean-field fixed points and the bistability curve;
//! * [`linear_response`] — the 6×6 frequency-domain fluctuation system and the
//!   transfer coefficients of the second-resonator field;
//! * [`squeezing`] — output-field correlations and the phase-optimized
//!   squeezing spectrum;
//! * [`covariance`] — quadrature drift/diffusion matrices, the steady-state
//!   Lyapunov solve, and the logarithmic negativity.
//!
//! All frequencies, couplings, and damping rates are angular (rad/s)
//! internally; conversion from ordinary frequency (Hz) happens exactly once at
//! the configuration boundary.

pub mod consts;
pub mod covariance;
pub mod linear_response;
pub mod model;
pub mod squeezing;
pub mod steady_state;

pub use nalgebra;
pub use nalgebra::Complex;

/// Complex double used throughout.
pub type C64 = Complex<f64>;
