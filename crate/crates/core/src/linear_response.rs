//! Frequency-domain linear response of the fluctuations.
//!
//! Fourier transforming the linearized Langevin equations and their adjoints
//! gives a 6×6 complex system A·u = n for
//! u = (δa, δa†, δb, δb†, δc, δc†)ᵀ with the noise vector
//! n = (√κ_a a_in, √κ_a a_in†, √γ_m b_in, √γ_m b_in†, √κ_c c_in, √κ_c c_in†)ᵀ.
//! The transfer coefficients ξ₁…ξ₆ of the second-resonator fluctuation
//! δa(ω) = ξ₁ a_in + ξ₂ a_in† + ξ₃ b_in + ξ₄ b_in† + ξ₅ c_in + ξ₆ c_in†
//! are the first row of A⁻¹ times the noise scalings.
//!
//! [`xi_numeric`] (direct LU solve) is the canonical path. [`xi_analytic`]
//! carries closed forms obtained by cofactor expansion of A and verified
//! against the numeric solve; a naive transcription of these expressions from
//! the usual presentations of this system needs several bracket corrections,
//! which are frozen here and covered by tests.

use crate::model::{DerivedParams, SystemParams};
use crate::steady_state::MeanFields;
use crate::C64;
use nalgebra::Matrix6;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LinearResponseError {
    #[error("response matrix is singular at omega = {omega:.6e} rad/s")]
    SingularMatrix { omega: f64 },
    #[error("closed-form denominator vanishes at omega = {omega:.6e} rad/s")]
    ZeroDenominator { omega: f64 },
}

/// The 6×6 coefficient matrix at one analysis frequency, with its named
/// diagonal factors and coupling entries.
#[derive(Debug, Clone)]
pub struct ResponseMatrix {
    pub omega: f64,
    pub entries: Matrix6<C64>,
    /// η± = κ_a/2 + i(ω ± Δ_f)
    pub eta_plus: C64,
    pub eta_minus: C64,
    /// v± = γ_m/2 + i(ω ± ω_m)
    pub v_plus: C64,
    pub v_minus: C64,
    /// u± = κ_c/2 + i(ω ± ω_c)
    pub u_plus: C64,
    pub u_minus: C64,
    /// G = i g_a ⟨a⟩
    pub g: C64,
    /// B = −2iα⟨b⟩
    pub b: C64,
    /// C = 2iα⟨c⟩
    pub c: C64,
}

/// Assemble the fluctuation system at analysis frequency `omega` (rad/s).
pub fn build_matrix(
    d: &DerivedParams,
    m: &MeanFields,
    p: &SystemParams,
    omega: f64,
) -> ResponseMatrix {
    let i = C64::new(0.0, 1.0);
    let eta_plus = C64::new(p.kappa_a / 2.0, omega + m.delta_f);
    let eta_minus = C64::new(p.kappa_a / 2.0, omega - m.delta_f);
    let v_plus = C64::new(p.gamma_m / 2.0, omega + p.omega_m);
    let v_minus = C64::new(p.gamma_m / 2.0, omega - p.omega_m);
    let u_plus = C64::new(p.kappa_c / 2.0, omega + p.omega_c);
    let u_minus = C64::new(p.kappa_c / 2.0, omega - p.omega_c);
    let g = i * p.g_a * m.a_mean;
    let b = -i * 2.0 * d.alpha * m.b_mean;
    let c = i * 2.0 * d.alpha * m.c_mean;
    let (gc, bc, cc) = (g.conj(), b.conj(), c.conj());
    let z = C64::new(0.0, 0.0);
    let entries = Matrix6::from_rows(&[
        [eta_plus, z, g, g, z, z].into(),
        [z, eta_minus, gc, gc, z, z].into(),
        [-gc, g, v_plus, c, bc, z].into(),
        [gc, -g, cc, v_minus, z, b].into(),
        [z, z, b, z, u_plus, z].into(),
        [z, z, z, bc, z, u_minus].into(),
    ]);
    ResponseMatrix {
        omega,
        entries,
        eta_plus,
        eta_minus,
        v_plus,
        v_minus,
        u_plus,
        u_minus,
        g,
        b,
        c,
    }
}

/// Transfer coefficients of δa(ω) onto the six input noises.
#[derive(Debug, Clone, PartialEq)]
pub struct XiCoefficients {
    pub omega: f64,
    pub xi: [C64; 6],
    /// Closed-form denominator; populated by the analytic path only.
    pub d_omega: Option<C64>,
}

fn noise_scales(p: &SystemParams) -> [f64; 6] {
    let (ka, gm, kc) = (p.kappa_a.sqrt(), p.gamma_m.sqrt(), p.kappa_c.sqrt());
    [ka, ka, gm, gm, kc, kc]
}

/// Canonical path: solve the 6×6 system and read off the first row of the
/// inverse, scaled by the noise prefactors.
pub fn xi_numeric(
    d: &DerivedParams,
    m: &MeanFields,
    p: &SystemParams,
    omega: f64,
) -> Result<XiCoefficients, LinearResponseError> {
    let rm = build_matrix(d, m, p, omega);
    let inv = rm
        .entries
        .lu()
        .try_inverse()
        .ok_or(LinearResponseError::SingularMatrix { omega })?;
    let sc = noise_scales(p);
    let mut xi = [C64::new(0.0, 0.0); 6];
    for (k, x) in xi.iter_mut().enumerate() {
        *x = inv[(0, k)] * sc[k];
    }
    Ok(XiCoefficients {
        omega,
        xi,
        d_omega: None,
    })
}

/// Cross-check path: closed forms from cofactor expansion of the system
/// matrix. Matches [`xi_numeric`] to machine precision away from zeros of the
/// denominator.
pub fn xi_analytic(
    d: &DerivedParams,
    m: &MeanFields,
    p: &SystemParams,
    omega: f64,
) -> Result<XiCoefficients, LinearResponseError> {
    let rm = build_matrix(d, m, p, omega);
    let (eta_p, eta_m) = (rm.eta_plus, rm.eta_minus);
    let (v_p, v_m) = (rm.v_plus, rm.v_minus);
    let (u_p, u_m) = (rm.u_plus, rm.u_minus);
    let (g, b, c) = (rm.g, rm.b, rm.c);
    let b2 = C64::new(b.norm_sqr(), 0.0);
    let c2 = C64::new(c.norm_sqr(), 0.0);
    let g2 = C64::new(g.norm_sqr(), 0.0);
    let two_i_im_c = c - c.conj();

    let phi = (u_m * v_m - b2) * (u_p * v_p - b2) - u_m * u_p * c2;
    let psi = (u_m - u_p) * b2 + u_m * u_p * (v_m - v_p + two_i_im_c);
    let den = eta_m * eta_p * phi + (eta_m - eta_p) * g2 * psi;
    let scale = eta_m.norm() * eta_p.norm() * phi.norm() + g2.re * psi.norm();
    if den.norm() < 1e-14 * scale.max(f64::MIN_POSITIVE) {
        return Err(LinearResponseError::ZeroDenominator { omega });
    }
    // shared brackets of the mechanical/first-resonator cofactors
    let br_m = b2 + u_m * c.conj() - u_m * v_m;
    let br_p = b2 + u_p * c - u_p * v_p;

    let sqrt_ka = p.kappa_a.sqrt();
    let sqrt_gm = p.gamma_m.sqrt();
    let sqrt_kc = p.kappa_c.sqrt();
    let xi = [
        (eta_m * phi - g2 * psi) * sqrt_ka / den,
        g * g * psi * sqrt_ka / den,
        g * eta_m * u_p * br_m * sqrt_gm / den,
        g * eta_m * u_m * br_p * sqrt_gm / den,
        -(g * eta_m * b.conj() * br_m) * sqrt_kc / den,
        -(g * eta_m * b * br_p) * sqrt_kc / den,
    ];
    Ok(XiCoefficients {
        omega,
        xi,
        d_omega: Some(den),
    })
}

/// A symmetric analysis grid: sorted ascending, every frequency paired with
/// its exact negation, so ±ω lookups used by the output spectra are exact.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricGrid {
    values: Vec<f64>,
}

#[derive(Debug, Error, PartialEq)]
pub enum GridError {
    #[error("grid needs at least two points")]
    TooSmall,
    #[error("frequency grid is not symmetric about zero: missing partner for {omega:.6e}")]
    GridAsymmetry { omega: f64 },
}

impl SymmetricGrid {
    /// Build ±max_abs with `n` points, mirrored exactly about zero. Odd `n`
    /// includes ω = 0.
    pub fn symmetric(max_abs: f64, n: usize) -> Result<Self, GridError> {
        // the negated comparison also rejects NaN
        if n < 2 || max_abs.is_nan() || max_abs <= 0.0 {
            return Err(GridError::TooSmall);
        }
        let mut values = vec![0.0; n];
        let half = n / 2;
        for k in 0..half {
            // positive half, then mirror with exact negation
            let idx_hi = n - 1 - k;
            let t = (idx_hi - half) as f64 + if n.is_multiple_of(2) { 0.5 } else { 0.0 };
            let steps = (n - 1) as f64 / 2.0;
            let w = max_abs * t / steps;
            values[idx_hi] = w;
            values[k] = -w;
        }
        if n % 2 == 1 {
            values[half] = 0.0;
        }
        Ok(SymmetricGrid { values })
    }

    /// Validate and adopt caller-provided frequencies (any order). Fails with
    /// [`GridError::GridAsymmetry`] when some ω has no partner at −ω.
    pub fn from_values(mut values: Vec<f64>) -> Result<Self, GridError> {
        if values.len() < 2 {
            return Err(GridError::TooSmall);
        }
        values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let n = values.len();
        let tol = 1e-12 * values[n - 1].abs().max(values[0].abs());
        for k in 0..n {
            if (values[k] + values[n - 1 - k]).abs() > tol {
                return Err(GridError::GridAsymmetry { omega: values[k] });
            }
        }
        Ok(SymmetricGrid { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Index of the exact −ω partner of entry `k`.
    pub fn mirror_index(&self, k: usize) -> usize {
        self.values.len() - 1 - k
    }
}
