//! Run configuration: one strict JSON document per invocation.
//!
//! Frequencies, couplings, and damping rates are f-values in Hz (converted to
//! angular internally, once); temperatures in K; power in W. Unknown keys are
//! a hard error so typos cannot silently fall back to defaults.

use electromech::consts::TWO_PI;
use electromech::model::{ParamError, QubitState, SystemParams, SystemParamsHz};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("failed to read config: {0}")]
    Io(#[from] std::io::Error),
    #[error("config parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid parameters: {0}")]
    Params(#[from] ParamError),
    #[error("grid spec invalid: {0}")]
    Grid(String),
    #[error("missing `{0}` section for this subcommand")]
    MissingSection(&'static str),
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub params: ParamsConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bistability: Option<BistabilityConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub squeezing: Option<SqueezingConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entanglement: Option<EntanglementConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputConfig>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    pub f_m_hz: f64,
    pub f_a_hz: f64,
    pub f_c_hz: f64,
    pub f_q_hz: f64,
    pub f_d_hz: f64,
    pub g_a_hz: f64,
    pub g_b_hz: f64,
    pub g_c_hz: f64,
    pub kappa_a_hz: f64,
    pub kappa_c_hz: f64,
    pub gamma_m_hz: f64,
    pub t_a_k: f64,
    pub t_b_k: f64,
    pub t_c_k: f64,
    pub power_watt: f64,
    /// Multiplier applied to the pump power before the drive-amplitude
    /// conversion; 1.0 is SI. Bundled figure configs carry the normalization
    /// of the datasets they reproduce.
    #[serde(default = "one")]
    pub drive_power_scale: f64,
    #[serde(default)]
    pub qubit_state: QubitStateConfig,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq, Default)]
#[serde(rename_all = "snake_case")]
pub enum QubitStateConfig {
    #[default]
    Ground,
    Excited,
}

impl From<QubitStateConfig> for QubitState {
    fn from(q: QubitStateConfig) -> Self {
        match q {
            QubitStateConfig::Ground => QubitState::Ground,
            QubitStateConfig::Excited => QubitState::Excited,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub n: usize,
    pub spacing: Spacing,
}

impl GridSpec {
    pub fn values(&self) -> Result<Vec<f64>, ConfigError> {
        if self.n < 2 {
            return Err(ConfigError::Grid(format!(
                "n = {} (need at least 2)",
                self.n
            )));
        }
        // NaN fails this comparison too
        if self.min >= self.max || self.min.is_nan() || self.max.is_nan() {
            return Err(ConfigError::Grid(format!(
                "min {} must be below max {}",
                self.min, self.max
            )));
        }
        if self.spacing == Spacing::Log && self.min <= 0.0 {
            return Err(ConfigError::Grid("log spacing needs min > 0".into()));
        }
        let n = self.n;
        Ok((0..n)
            .map(|k| {
                let t = k as f64 / (n - 1) as f64;
                match self.spacing {
                    Spacing::Linear => self.min + (self.max - self.min) * t,
                    Spacing::Log => self.min * (self.max / self.min).powf(t),
                }
            })
            .collect())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct BistabilityConfig {
    /// Phonon-intensity grid parameterizing the S-curve.
    pub i_b_grid: GridSpec,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct OmegaGridSpec {
    /// Half-width of the symmetric analysis grid in units of ω_m.
    pub max_abs_over_omega_m: f64,
    pub n: usize,
}

impl Default for OmegaGridSpec {
    fn default() -> Self {
        OmegaGridSpec {
            max_abs_over_omega_m: 3.0,
            n: 4001,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SqueezingConfig {
    #[serde(default)]
    pub omega_grid: OmegaGridSpec,
    /// When present, scan pump power for the deepest squeezing instead of
    /// emitting a single spectrum.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub power_scan: Option<GridSpec>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum SweepVarConfig {
    /// First-resonator bath temperature, K.
    TC,
    /// Second-resonator bath temperature, K.
    TA,
    /// Drive detuning (ω_a − ω_d)/2π, Hz.
    DeltaA,
    /// Pump power, W.
    Power,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct EntanglementConfig {
    pub sweep: SweepVarConfig,
    pub grid: GridSpec,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
}

impl ParamsConfig {
    pub fn to_hz(&self) -> SystemParamsHz {
        SystemParamsHz {
            f_m: self.f_m_hz,
            f_a: self.f_a_hz,
            f_c: self.f_c_hz,
            f_q: self.f_q_hz,
            f_d: self.f_d_hz,
            g_a: self.g_a_hz,
            g_b: self.g_b_hz,
            g_c: self.g_c_hz,
            kappa_a: self.kappa_a_hz,
            kappa_c: self.kappa_c_hz,
            gamma_m: self.gamma_m_hz,
            t_a: self.t_a_k,
            t_b: self.t_b_k,
            t_c: self.t_c_k,
            pump_power: self.power_watt,
            drive_power_scale: self.drive_power_scale,
            qubit_state: self.qubit_state.into(),
        }
    }

    pub fn to_angular(&self) -> Result<SystemParams, ConfigError> {
        Ok(self.to_hz().to_angular()?)
    }
}

impl RunConfig {
    pub fn from_path(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// Detuning sweep values arrive in Hz; the covariance sweep wants rad/s.
pub fn sweep_value_to_internal(var: SweepVarConfig, value: f64) -> f64 {
    match var {
        SweepVarConfig::DeltaA => TWO_PI * value,
        _ => value,
    }
}
