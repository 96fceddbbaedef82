//! Output-field correlations and the phase-optimized squeezing spectrum of the
//! transmitted second-resonator field.
//!
//! With the input–output relation a_out = √κ_a δa − a_in and the transfer
//! coefficients ξ_k(ω) of [`crate::linear_response`], the output quadrature
//! spectrum optimized over the measurement phase is
//!
//! ```text
//! S_±(ω) = 1 + 2 C_a†a(ω) ± 2 |C_aa(ω)|
//! ```
//!
//! where `C_a†a(ω) = [𝔄(ω) + 𝔄(−ω)]/2` symmetrizes the normally ordered
//! output intensity density
//!
//! ```text
//! 𝔄(ω) = n_a|√κ_a ξ₁ − 1|² + κ_a[(n_a+1)|ξ₂|² + n_b|ξ₃|² + (n_b+1)|ξ₄|²
//!        + n_c|ξ₅|² + (n_c+1)|ξ₆|²]
//! ```
//!
//! and `C_aa` pairs the output transfer functions at ∓ω:
//!
//! ```text
//! C_aa(ω) = (n_a+1)T₁(−ω)T₂(ω) + n_a T₂(−ω)T₁(ω) + (n_b+1)T₃(−ω)T₄(ω)
//!         + n_b T₄(−ω)T₃(ω) + (n_c+1)T₅(−ω)T₆(ω) + n_c T₆(−ω)T₅(ω),
//! T₁ = √κ_a ξ₁ − 1,  T_k = √κ_a ξ_k otherwise.
//! ```
//!
//! The T₁ interference terms carry the input–output subtraction; they
//! guarantee S_± = 1 exactly for a decoupled vacuum input and a flat
//! 1 + 2n_a for a decoupled thermal input. `C_a†a` is real and non-negative
//! by construction (it is a sum of weighted |·|², which is also what makes
//! S₊ ≥ 1 ≥ can-be S₋ and S₊ ≥ S₋ automatic); the constructor still asserts
//! the Im(C_a†a) bound rather than assuming it.

use crate::covariance::{drift_matrix, stability, Stability};
use crate::linear_response::{
    xi_numeric, GridError, LinearResponseError, SymmetricGrid, XiCoefficients,
};
use crate::model::{DerivedParams, SystemParams};
use crate::steady_state::{mean_fields_zero_field_branch, MeanFields, SteadyStateError};
use crate::C64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SqueezingError {
    #[error("operating point is dynamically unstable; spectrum undefined")]
    UnstablePoint,
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Response(#[from] LinearResponseError),
    #[error(transparent)]
    SteadyState(#[from] SteadyStateError),
    #[error("xi coefficients supplied at mismatched frequencies: {plus:.6e} vs {minus:.6e}")]
    FrequencyMismatch { plus: f64, minus: f64 },
    #[error("C_a†a developed an imaginary part beyond tolerance")]
    ComplexIntensity,
}

/// Bath occupations entering the spectra.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Occupations {
    pub n_a: f64,
    pub n_b: f64,
    pub n_c: f64,
}

impl From<&DerivedParams> for Occupations {
    fn from(d: &DerivedParams) -> Self {
        Occupations {
            n_a: d.n_a,
            n_b: d.n_b,
            n_c: d.n_c,
        }
    }
}

/// One frequency of the squeezing spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumPoint {
    pub omega: f64,
    /// Squeezed-quadrature spectrum; below 1 means squeezing.
    pub s_minus: f64,
    /// Unsqueezed-quadrature spectrum.
    pub s_plus: f64,
    pub c_ada: C64,
    pub c_aa: C64,
}

impl SpectrumPoint {
    pub fn is_squeezed(&self) -> bool {
        self.s_minus < 1.0
    }
}

/// Output transfer functions T_k(ω); T₁ carries the input–output interference.
fn output_transfer(xi: &XiCoefficients, kappa_a: f64) -> [C64; 6] {
    let sq = kappa_a.sqrt();
    let mut t = xi.xi.map(|x| x * sq);
    t[0] -= C64::new(1.0, 0.0);
    t
}

/// Normally ordered output intensity density 𝔄(ω) ≥ 0.
fn intensity_density(xi: &XiCoefficients, occ: &Occupations, kappa_a: f64) -> f64 {
    let t = output_transfer(xi, kappa_a);
    occ.n_a * t[0].norm_sqr()
        + (occ.n_a + 1.0) * t[1].norm_sqr()
        + occ.n_b * t[2].norm_sqr()
        + (occ.n_b + 1.0) * t[3].norm_sqr()
        + occ.n_c * t[4].norm_sqr()
        + (occ.n_c + 1.0) * t[5].norm_sqr()
}

/// Output correlations (C_a†a, C_aa) at +ω from the coefficients at ±ω.
///
/// Requires the pair of frequencies to be exact negations (symmetric grid).
pub fn output_correlations(
    xi_plus: &XiCoefficients,
    xi_minus: &XiCoefficients,
    occ: &Occupations,
    kappa_a: f64,
) -> Result<(C64, C64), SqueezingError> {
    if xi_plus.omega != -xi_minus.omega {
        return Err(SqueezingError::FrequencyMismatch {
            plus: xi_plus.omega,
            minus: xi_minus.omega,
        });
    }
    let c_ada = C64::new(
        0.5 * (intensity_density(xi_plus, occ, kappa_a)
            + intensity_density(xi_minus, occ, kappa_a)),
        0.0,
    );
    if c_ada.im.abs() > 1e-8 * c_ada.re.abs().max(f64::MIN_POSITIVE) {
        return Err(SqueezingError::ComplexIntensity);
    }
    let tp = output_transfer(xi_plus, kappa_a);
    let tm = output_transfer(xi_minus, kappa_a);
    let c_aa = (occ.n_a + 1.0) * tm[0] * tp[1]
        + occ.n_a * tm[1] * tp[0]
        + (occ.n_b + 1.0) * tm[2] * tp[3]
        + occ.n_b * tm[3] * tp[2]
        + (occ.n_c + 1.0) * tm[4] * tp[5]
        + occ.n_c * tm[5] * tp[4];
    Ok((c_ada, c_aa))
}

fn ensure_stable(
    d: &DerivedParams,
    m: &MeanFields,
    p: &SystemParams,
) -> Result<(), SqueezingError> {
    let r = drift_matrix(d, m, p);
    if stability(&r, p) != Stability::Stable {
        return Err(SqueezingError::UnstablePoint);
    }
    Ok(())
}

/// Phase-optimized squeezing spectrum S_±(ω) on a symmetric grid at a stable
/// operating point. Spectra at unstable points are refused.
pub fn squeezing_spectrum(
    d: &DerivedParams,
    m: &MeanFields,
    p: &SystemParams,
    grid: &SymmetricGrid,
) -> Result<Vec<SpectrumPoint>, SqueezingError> {
    ensure_stable(d, m, p)?;
    let occ = Occupations::from(d);
    let xs: Vec<XiCoefficients> = grid
        .values()
        .iter()
        .map(|&w| xi_numeric(d, m, p, w))
        .collect::<Result<_, _>>()?;
    let mut out = Vec::with_capacity(grid.len());
    for k in 0..grid.len() {
        let xp = &xs[k];
        let xm = &xs[grid.mirror_index(k)];
        let (c_ada, c_aa) = output_correlations(xp, xm, &occ, p.kappa_a)?;
        let s_minus = 1.0 + 2.0 * c_ada.re - 2.0 * c_aa.norm();
        let s_plus = 1.0 + 2.0 * c_ada.re + 2.0 * c_aa.norm();
        out.push(SpectrumPoint {
            omega: xp.omega,
            s_minus,
            s_plus,
            c_ada,
            c_aa,
        });
    }
    Ok(out)
}

/// Outcome of one power in [`max_squeezing_scan`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub power: f64,
    /// min over the grid of S_−; absent when the operating point is unstable.
    pub s_min: Option<f64>,
    pub stable: bool,
}

/// Result of a drive-power scan for the deepest squeezing.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    pub rows: Vec<ScanRow>,
    /// (power, S_min) of the stable point with the deepest squeezing.
    pub optimum: Option<(f64, f64)>,
}

impl ScanResult {
    /// Figure of merit: percentage below the standard quantum
    /// limit at the optimum.
    pub fn percent_below_sql(&self) -> Option<f64> {
        self.optimum.map(|(_, s)| (1.0 - s) * 100.0)
    }
}

/// Scan pump power (same convention as `SystemParams::pump_power`) for the
/// deepest squeezing across the grid. Unstable points are reported, not fatal.
pub fn max_squeezing_scan(base: &SystemParams, powers: &[f64], grid: &SymmetricGrid) -> ScanResult {
    let mut rows = Vec::with_capacity(powers.len());
    let mut optimum: Option<(f64, f64)> = None;
    for &power in powers {
        let mut p = base.clone();
        p.pump_power = power;
        let row = (|| -> Result<f64, SqueezingError> {
            let d = crate::model::derive(&p).map_err(|_| SqueezingError::UnstablePoint)?;
            let m = mean_fields_zero_field_branch(&d, &p)?;
            let spectrum = squeezing_spectrum(&d, &m, &p, grid)?;
            Ok(spectrum
                .iter()
                .map(|pt| pt.s_minus)
                .fold(f64::INFINITY, f64::min))
        })();
        match row {
            Ok(s_min) => {
                if optimum.is_none_or(|(_, best)| s_min < best) {
                    optimum = Some((power, s_min));
                }
                rows.push(ScanRow {
                    power,
                    s_min: Some(s_min),
                    stable: true,
                });
            }
            Err(_) => rows.push(ScanRow {
                power,
                s_min: None,
                stable: false,
            }),
        }
    }
    ScanResult { rows, optimum }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{baseline_hz, derive, SystemParamsHz};
    use approx::assert_relative_eq;

    fn spectrum_regime_hz() -> SystemParamsHz {
        let mut hz = baseline_hz();
        hz.f_d = 7.4999e9;
        hz.pump_power = 8e-6;
        hz.drive_power_scale = 1e-6;
        hz.t_a = 0.15;
        hz.t_b = 0.05;
        hz.t_c = 2.0;
        hz
    }

    fn spectrum_at(hz: &SystemParamsHz, n: usize) -> Vec<SpectrumPoint> {
        let p = hz.to_angular().unwrap();
        let d = derive(&p).unwrap();
        let m = mean_fields_zero_field_branch(&d, &p).unwrap();
        let grid = SymmetricGrid::symmetric(3.0 * p.omega_m, n).unwrap();
        squeezing_spectrum(&d, &m, &p, &grid).unwrap()
    }

    #[test]
    fn vacuum_decoupled_limit_sits_on_the_sql() {
        let mut hz = baseline_hz();
        hz.g_a = 0.0;
        hz.g_b = 0.0;
        hz.pump_power = 0.0;
        hz.t_a = 0.0;
        hz.t_b = 0.0;
        hz.t_c = 0.0;
        for pt in spectrum_at(&hz, 201) {
            assert!((pt.s_minus - 1.0).abs() < 1e-10, "S- at {}", pt.omega);
            assert!((pt.s_plus - 1.0).abs() < 1e-10);
            assert!(pt.c_ada.norm() < 1e-12);
            assert!(pt.c_aa.norm() < 1e-12);
        }
    }

    #[test]
    fn zero_optomechanical_coupling_is_vacuum_output() {
        // g_a = 0 with the qubit still attached and the cavity driven
        let mut hz = baseline_hz();
        hz.g_a = 0.0;
        hz.pump_power = 1e-9;
        hz.t_a = 0.0;
        for pt in spectrum_at(&hz, 101) {
            assert!((pt.s_minus - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn thermal_decoupled_limit_is_flat() {
        let mut hz = baseline_hz();
        hz.g_a = 0.0;
        hz.g_b = 0.0;
        hz.pump_power = 0.0;
        hz.t_a = 0.15;
        hz.t_b = 0.0;
        hz.t_c = 0.0;
        let p = hz.to_angular().unwrap();
        let d = derive(&p).unwrap();
        for pt in spectrum_at(&hz, 101) {
            assert_relative_eq!(pt.c_ada.re, d.n_a, max_relative = 1e-10);
            assert!(
                pt.c_aa.norm() < 1e-12 * d.n_a,
                "thermal state has no phase correlations"
            );
            assert_relative_eq!(pt.s_minus, 1.0 + 2.0 * d.n_a, max_relative = 1e-10);
            assert_relative_eq!(pt.s_plus, 1.0 + 2.0 * d.n_a, max_relative = 1e-10);
        }
    }

    #[test]
    fn driven_spectrum_shows_two_symmetric_dips() {
        let sp = spectrum_at(&spectrum_regime_hz(), 4001);
        let s: Vec<f64> = sp.iter().map(|pt| pt.s_minus).collect();
        let mut minima = Vec::new();
        for i in 1..s.len() - 1 {
            if s[i] < 1.0 && s[i] < s[i - 1] && s[i] <= s[i + 1] {
                minima.push(i);
            }
        }
        assert_eq!(minima.len(), 2, "expected a double dip");
        let w0 = sp[minima[0]].omega;
        let w1 = sp[minima[1]].omega;
        assert!(
            (w0 + w1).abs() < 1e-6 * w1.abs().max(1.0),
            "dips symmetric about 0"
        );
        assert!(sp[minima[0]].s_minus < 0.5);
        // wherever S- < 1, S+ must sit at or above the SQL
        for pt in &sp {
            assert!(pt.s_plus >= pt.s_minus);
            if pt.s_minus < 1.0 {
                assert!(pt.s_plus >= 1.0);
            }
            assert!(pt.s_minus >= 0.0);
            assert!(pt.c_ada.im.abs() <= 1e-8 * pt.c_ada.re.abs().max(1e-300));
        }
    }

    #[test]
    fn unstable_point_is_refused() {
        let mut hz = spectrum_regime_hz();
        hz.pump_power = 50e-6; // beyond the stability edge of this regime
        let p = hz.to_angular().unwrap();
        let d = derive(&p).unwrap();
        let m = mean_fields_zero_field_branch(&d, &p).unwrap();
        let grid = SymmetricGrid::symmetric(3.0 * p.omega_m, 101).unwrap();
        assert!(matches!(
            squeezing_spectrum(&d, &m, &p, &grid),
            Err(SqueezingError::UnstablePoint)
        ));
    }

    #[test]
    fn spectrum_independent_of_grid_permutation() {
        let hz = spectrum_regime_hz();
        let p = hz.to_angular().unwrap();
        let d = derive(&p).unwrap();
        let m = mean_fields_zero_field_branch(&d, &p).unwrap();
        let g1 = SymmetricGrid::symmetric(3.0 * p.omega_m, 41).unwrap();
        let mut shuffled = g1.values().to_vec();
        shuffled.reverse();
        shuffled.swap(3, 17);
        let g2 = SymmetricGrid::from_values(shuffled).unwrap();
        let s1 = squeezing_spectrum(&d, &m, &p, &g1).unwrap();
        let s2 = squeezing_spectrum(&d, &m, &p, &g2).unwrap();
        assert_eq!(s1.len(), s2.len());
        for (a, b) in s1.iter().zip(&s2) {
            assert_eq!(a.omega, b.omega);
            assert_eq!(a.s_minus, b.s_minus);
        }
    }

    #[test]
    fn mismatched_pair_is_rejected() {
        let hz = spectrum_regime_hz();
        let p = hz.to_angular().unwrap();
        let d = derive(&p).unwrap();
        let m = mean_fields_zero_field_branch(&d, &p).unwrap();
        let occ = Occupations::from(&d);
        let x1 = xi_numeric(&d, &m, &p, 1.0e6).unwrap();
        let x2 = xi_numeric(&d, &m, &p, -2.0e6).unwrap();
        assert!(matches!(
            output_correlations(&x1, &x2, &occ, p.kappa_a),
            Err(SqueezingError::FrequencyMismatch { .. })
        ));
    }

    #[test]
    fn squeezing_dies_with_hot_input_bath() {
        // raising T_a washes the dips out; by ~1.5 K nothing is below the SQL here
        let mut hz = spectrum_regime_hz();
        hz.t_a = 1.5;
        let sp = spectrum_at(&hz, 1001);
        assert!(sp.iter().all(|pt| pt.s_minus >= 1.0));
        // while at 150 mK the dips are deep
        let sp = spectrum_at(&spectrum_regime_hz(), 1001);
        assert!(sp.iter().any(|pt| pt.s_minus < 0.5));
    }

    #[test]
    fn tc_is_the_less_sensitive_bath() {
        // doubling T_c (1 K -> 2 K) moves min S- far less than doubling T_a
        // (150 mK -> 300 mK) does
        let smin = |t_a: f64, t_c: f64| {
            let mut hz = spectrum_regime_hz();
            hz.t_a = t_a;
            hz.t_c = t_c;
            spectrum_at(&hz, 801)
                .iter()
                .map(|pt| pt.s_minus)
                .fold(f64::INFINITY, f64::min)
        };
        let base = smin(0.15, 1.0);
        let d_tc = (smin(0.15, 2.0) - base).abs();
        let d_ta = (smin(0.30, 1.0) - base).abs();
        assert!(d_tc < d_ta, "d_tc={d_tc}, d_ta={d_ta}");
    }

    #[test]
    fn power_scan_finds_an_interior_optimum() {
        let mut hz = spectrum_regime_hz();
        hz.t_a = 0.01;
        hz.t_b = 0.01;
        hz.t_c = 2.0;
        hz.f_d = hz.f_a - 1e5;
        let p = hz.to_angular().unwrap();
        let grid = SymmetricGrid::symmetric(3.0 * p.omega_m, 801).unwrap();
        let powers: Vec<f64> = (1..=15).map(|k| 2e-6 * k as f64).collect();
        let scan = max_squeezing_scan(&p, &powers, &grid);
        let (p_opt, s_min) = scan.optimum.unwrap();
        assert!(s_min < 0.15, "deep squeezing at the optimum, got {s_min}");
        assert!(p_opt > powers[0] && p_opt < *powers.last().unwrap());
        assert!(
            scan.rows.iter().any(|r| !r.stable),
            "scan crosses the stability edge"
        );
        assert!(scan.percent_below_sql().unwrap() > 85.0);
    }

    #[test]
    fn optimum_survives_a_warmer_input_bath() {
        // raising T_a to 250 mK still leaves an interior optimum below the SQL
        let mut hz = spectrum_regime_hz();
        hz.t_a = 0.25;
        hz.t_b = 0.01;
        hz.f_d = hz.f_a - 1e5;
        let p = hz.to_angular().unwrap();
        let grid = SymmetricGrid::symmetric(3.0 * p.omega_m, 801).unwrap();
        let powers: Vec<f64> = (1..=15).map(|k| 2e-6 * k as f64).collect();
        let scan = max_squeezing_scan(&p, &powers, &grid);
        let (_, s_min) = scan.optimum.unwrap();
        assert!(s_min < 1.0, "squeezing must persist at 250 mK, got {s_min}");
    }

    #[test]
    fn zero_drive_scan_row_is_sql_flat() {
        let mut hz = spectrum_regime_hz();
        hz.t_a = 0.0;
        hz.t_b = 0.0;
        hz.t_c = 0.0;
        let p = hz.to_angular().unwrap();
        let grid = SymmetricGrid::symmetric(3.0 * p.omega_m, 101).unwrap();
        let scan = max_squeezing_scan(&p, &[0.0], &grid);
        let s = scan.rows[0].s_min.unwrap();
        assert!((s - 1.0).abs() < 1e-10);
    }
}
