//! Closed-form roots of the standard bistability cubic (no qubit, F = 1),
//! used as the independent reference for the parametric curve at α = 0.
//!
//! The intensity equation I[(Δ − kI)² + c²] = E expands to
//! k²I³ − 2kΔ I² + (Δ² + c²) I − E = 0 with k = 2 g_a² ω_m / (ω_m² + (γ_m/2)²),
//! c = κ_a/2, E = |ε|². Solved here with Cardano's formula plus one Newton
//! polish per root.

use electromech::model::{DerivedParams, SystemParams};

/// Positive real roots I_a of the standard cubic at squared drive `eps_sq`,
/// ascending.
pub fn standard_cubic_intensities(d: &DerivedParams, p: &SystemParams, eps_sq: f64) -> Vec<f64> {
    let w = p.omega_m * p.omega_m + (p.gamma_m / 2.0) * (p.gamma_m / 2.0);
    let k = 2.0 * p.g_a * p.g_a * p.omega_m / w;
    let c = p.kappa_a / 2.0;
    let delta = d.delta_a;
    if k == 0.0 {
        // linear cavity
        return vec![eps_sq / (delta * delta + c * c)];
    }
    // normalize to x^3 + a2 x^2 + a1 x + a0 = 0
    let a2 = -2.0 * delta / k;
    let a1 = (delta * delta + c * c) / (k * k);
    let a0 = -eps_sq / (k * k);
    let mut roots = cardano(a2, a1, a0);
    // Newton polish against the unnormalized residual
    let f = |x: f64| x * ((delta - k * x).powi(2) + c * c) - eps_sq;
    let fp = |x: f64| (delta - k * x).powi(2) + c * c - 2.0 * k * x * (delta - k * x);
    for r in roots.iter_mut() {
        for _ in 0..3 {
            let d_fp = fp(*r);
            if d_fp != 0.0 {
                *r -= f(*r) / d_fp;
            }
        }
    }
    roots.retain(|&x| x > 0.0);
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    roots.dedup_by(|a, b| (*a - *b).abs() < 1e-9 * b.abs().max(1.0));
    roots
}

/// Real roots of x³ + a2 x² + a1 x + a0.
fn cardano(a2: f64, a1: f64, a0: f64) -> Vec<f64> {
    let p = a1 - a2 * a2 / 3.0;
    let q = 2.0 * a2.powi(3) / 27.0 - a2 * a1 / 3.0 + a0;
    let shift = -a2 / 3.0;
    let disc = (q / 2.0).powi(2) + (p / 3.0).powi(3);
    if disc > 0.0 {
        let s = disc.sqrt();
        let u = cbrt(-q / 2.0 + s);
        let v = cbrt(-q / 2.0 - s);
        vec![u + v + shift]
    } else {
        // three real roots (trigonometric form)
        let rho = (-(p / 3.0).powi(3)).sqrt();
        let theta = ((-q / 2.0) / rho).clamp(-1.0, 1.0).acos();
        let m = 2.0 * (-p / 3.0).sqrt();
        (0..3)
            .map(|k| m * ((theta + 2.0 * std::f64::consts::PI * k as f64) / 3.0).cos() + shift)
            .collect()
    }
}

fn cbrt(x: f64) -> f64 {
    x.signum() * x.abs().powf(1.0 / 3.0)
}
