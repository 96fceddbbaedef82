//! Physical constants (CODATA 2018 / SI exact). All golden values depend on these.

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;

/// Planck constant, J·s (exact SI definition).
pub const PLANCK: f64 = 6.626_070_15e-34;

/// Boltzmann constant, J/K (exact SI definition).
pub const K_B: f64 = 1.380_649e-23;

/// 2π, the single conversion factor between ordinary and angular frequency.
pub const TWO_PI: f64 = 2.0 * std::f64::consts::PI;
