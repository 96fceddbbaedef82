//! System parameters, derived quantities, and regime validation.
//!
//! Configuration I/O quotes ordinary frequencies f = ω/2π in Hz (couplings and
//! damping rates included); everything here stores angular rates in rad/s.
//! The factor 2π is applied exactly once, in [`SystemParamsHz::to_angular`].

use crate::consts::{HBAR, K_B, PLANCK, TWO_PI};
use thiserror::Error;

/// State the qubit is adiabatically held in. Flipping it flips the sign of the
/// effective nonlinear coupling `alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QubitState {
    #[default]
    Ground,
    Excited,
}

/// Raw physical parameters as entered in configuration, f-values in Hz.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemParamsHz {
    pub f_m: f64,
    pub f_a: f64,
    pub f_c: f64,
    pub f_q: f64,
    pub f_d: f64,
    pub g_a: f64,
    pub g_b: f64,
    pub g_c: f64,
    pub kappa_a: f64,
    pub kappa_c: f64,
    pub gamma_m: f64,
    pub t_a: f64,
    pub t_b: f64,
    pub t_c: f64,
    pub pump_power: f64,
    pub drive_power_scale: f64,
    pub qubit_state: QubitState,
}

/// Internal parameter set, angular rates in rad/s.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemParams {
    pub omega_m: f64,
    pub omega_a: f64,
    pub omega_c: f64,
    pub omega_q: f64,
    pub omega_d: f64,
    pub g_a: f64,
    pub g_b: f64,
    pub g_c: f64,
    pub kappa_a: f64,
    pub kappa_c: f64,
    pub gamma_m: f64,
    /// Bath temperatures, K.
    pub t_a: f64,
    pub t_b: f64,
    pub t_c: f64,
    /// Pump power, W, in the convention of the configuration.
    pub pump_power: f64,
    /// Multiplier applied to the pump power before the drive-amplitude
    /// conversion. 1.0 is plain SI; the bundled figure configurations carry
    /// the normalization of the datasets they reproduce.
    pub drive_power_scale: f64,
    pub qubit_state: QubitState,
}

#[derive(Debug, Error, PartialEq)]
pub enum ParamError {
    #[error("{name} must be strictly positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("{name} must be non-negative, got {value}")]
    Negative { name: &'static str, value: f64 },
    #[error("{name} must be finite, got {value}")]
    NonFinite { name: &'static str, value: f64 },
}

#[derive(Debug, Error, PartialEq)]
pub enum DeriveError {
    #[error("degenerate qubit detuning {which} = 0; effective coupling undefined")]
    DegenerateDetuning { which: &'static str },
}

impl SystemParamsHz {
    /// Convert to angular rates, validating the invariants:
    /// frequencies and damping rates strictly positive, couplings and power
    /// non-negative, temperatures non-negative. Couplings may be zero so the
    /// decoupled limits (alpha = 0, g_a = 0) stay expressible.
    pub fn to_angular(&self) -> Result<SystemParams, ParamError> {
        let positive = [
            ("f_m", self.f_m),
            ("f_a", self.f_a),
            ("f_c", self.f_c),
            ("f_q", self.f_q),
            ("f_d", self.f_d),
            ("kappa_a", self.kappa_a),
            ("kappa_c", self.kappa_c),
            ("gamma_m", self.gamma_m),
            ("drive_power_scale", self.drive_power_scale),
        ];
        for (name, value) in positive {
            if !value.is_finite() {
                return Err(ParamError::NonFinite { name, value });
            }
            if value <= 0.0 {
                return Err(ParamError::NonPositive { name, value });
            }
        }
        let non_negative = [
            ("g_a", self.g_a),
            ("g_b", self.g_b),
            ("g_c", self.g_c),
            ("t_a", self.t_a),
            ("t_b", self.t_b),
            ("t_c", self.t_c),
            ("pump_power", self.pump_power),
        ];
        for (name, value) in non_negative {
            if !value.is_finite() {
                return Err(ParamError::NonFinite { name, value });
            }
            if value < 0.0 {
                return Err(ParamError::Negative { name, value });
            }
        }
        Ok(SystemParams {
            omega_m: TWO_PI * self.f_m,
            omega_a: TWO_PI * self.f_a,
            omega_c: TWO_PI * self.f_c,
            omega_q: TWO_PI * self.f_q,
            omega_d: TWO_PI * self.f_d,
            g_a: TWO_PI * self.g_a,
            g_b: TWO_PI * self.g_b,
            g_c: TWO_PI * self.g_c,
            kappa_a: TWO_PI * self.kappa_a,
            kappa_c: TWO_PI * self.kappa_c,
            gamma_m: TWO_PI * self.gamma_m,
            t_a: self.t_a,
            t_b: self.t_b,
            t_c: self.t_c,
            pump_power: self.pump_power,
            drive_power_scale: self.drive_power_scale,
            qubit_state: self.qubit_state,
        })
    }
}

impl SystemParams {
    /// Back-convert to f-values. Round-trips with [`SystemParamsHz::to_angular`]
    /// to within one ulp per field.
    pub fn to_hz(&self) -> SystemParamsHz {
        SystemParamsHz {
            f_m: self.omega_m / TWO_PI,
            f_a: self.omega_a / TWO_PI,
            f_c: self.omega_c / TWO_PI,
            f_q: self.omega_q / TWO_PI,
            f_d: self.omega_d / TWO_PI,
            g_a: self.g_a / TWO_PI,
            g_b: self.g_b / TWO_PI,
            g_c: self.g_c / TWO_PI,
            kappa_a: self.kappa_a / TWO_PI,
            kappa_c: self.kappa_c / TWO_PI,
            gamma_m: self.gamma_m / TWO_PI,
            t_a: self.t_a,
            t_b: self.t_b,
            t_c: self.t_c,
            pump_power: self.pump_power,
            drive_power_scale: self.drive_power_scale,
            qubit_state: self.qubit_state,
        }
    }

    /// Pump power implied by a squared drive amplitude, inverting the mapping
    /// used in [`derive()`] (includes `drive_power_scale`).
    pub fn power_from_drive_sq(&self, eps_drive_sq: f64) -> f64 {
        eps_drive_sq * HBAR * self.omega_a / (2.0 * self.kappa_a * self.drive_power_scale)
    }
}

/// Quantities computed once from the raw parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivedParams {
    /// Effective qubit-mediated nonlinear coupling, rad/s, signed: the value
    /// entering the ground-state equations of motion; flipped for `Excited`.
    pub alpha: f64,
    /// Drive amplitude from the SI power, rad/s: sqrt(2 κ_a P / ħ ω_a).
    pub epsilon: f64,
    /// Drive amplitude actually entering the dynamics, rad/s:
    /// sqrt(2 κ_a · drive_power_scale · P / ħ ω_a).
    pub epsilon_drive: f64,
    /// Drive detuning ω_a − ω_d, rad/s.
    pub delta_a: f64,
    /// Qubit–first-resonator detuning ω_q − ω_c, rad/s.
    pub delta_qc: f64,
    /// Qubit–mechanics detuning ω_q − 2ω_m, rad/s.
    pub delta_qm: f64,
    /// Thermal occupations of the three baths at their mode frequencies.
    pub n_a: f64,
    pub n_b: f64,
    pub n_c: f64,
}

/// Bose–Einstein occupation n = 1/(exp(h f / k_B T) − 1).
///
/// Returns exactly 0 at T = 0 and underflows cleanly (no NaN) for
/// h f >> k_B T.
pub fn thermal_occupation(f_hz: f64, t_kelvin: f64) -> f64 {
    debug_assert!(f_hz > 0.0 && t_kelvin >= 0.0);
    if t_kelvin == 0.0 {
        return 0.0;
    }
    let x = PLANCK * f_hz / (K_B * t_kelvin);
    1.0 / x.exp_m1()
}

/// Populate [`DerivedParams`] from validated parameters.
pub fn derive(p: &SystemParams) -> Result<DerivedParams, DeriveError> {
    let delta_qc = p.omega_q - p.omega_c;
    let delta_qm = p.omega_q - 2.0 * p.omega_m;
    if delta_qc == 0.0 {
        return Err(DeriveError::DegenerateDetuning { which: "delta_qc" });
    }
    if delta_qm == 0.0 {
        return Err(DeriveError::DegenerateDetuning { which: "delta_qm" });
    }
    let alpha_ground = p.g_b * p.g_c * (delta_qc + delta_qm) / (2.0 * delta_qm * delta_qc);
    let alpha = match p.qubit_state {
        QubitState::Ground => alpha_ground,
        QubitState::Excited => -alpha_ground,
    };
    let epsilon = (2.0 * p.kappa_a * p.pump_power / (HBAR * p.omega_a)).sqrt();
    let epsilon_drive = epsilon * p.drive_power_scale.sqrt();
    let hz = p.to_hz();
    Ok(DerivedParams {
        alpha,
        epsilon,
        epsilon_drive,
        delta_a: p.omega_a - p.omega_d,
        delta_qc,
        delta_qm,
        n_a: thermal_occupation(hz.f_a, p.t_a),
        n_b: thermal_occupation(hz.f_m, p.t_b),
        n_c: thermal_occupation(hz.f_c, p.t_c),
    })
}

/// A non-fatal diagnostic about the validity of the adiabatic elimination.
#[derive(Debug, Clone, PartialEq)]
pub struct RegimeWarning {
    pub message: String,
}

impl std::fmt::Display for RegimeWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

/// Dispersive-limit check: warns when min(|Δ_qm|, |Δ_qc|) < 10·sqrt(g_b² + g_c²).
///
/// The factor 10 operationalizes "much greater than"; the warning is never
/// fatal.
pub fn validate_dispersive(p: &SystemParams, d: &DerivedParams) -> Vec<RegimeWarning> {
    let g_scale = (p.g_b * p.g_b + p.g_c * p.g_c).sqrt();
    let min_det = d.delta_qm.abs().min(d.delta_qc.abs());
    let mut warnings = Vec::new();
    if min_det < 10.0 * g_scale {
        warnings.push(RegimeWarning {
            message: format!(
                "dispersive limit marginal: min(|delta_qm|, |delta_qc|) / sqrt(g_b^2 + g_c^2) \
                 = {:.3} < 10; the adiabatic elimination behind alpha may be inaccurate",
                min_det / g_scale
            ),
        });
    }
    warnings
}

#[cfg(test)]
pub(crate) use tests::baseline_hz;
