//! Classical mean-field steady states and the bistability curve.
//!
//! The coupled fixed-point conditions for the three mean fields are
//!
//! ```text
//! <a> = ε / (iΔ_f + κ_a/2),                 Δ_f = Δ_a + 2 g_a Re<b>
//! <b> = (−i g_a |<a>|² − 2iα <c><b*>) / (iω_m + γ_m/2)
//! <c> = iα <b>² / (iω_c + κ_c/2)
//! ```
//!
//! Eliminating `<c>` and `<b*>` gives `<b>·M(I_b) = −i g_a I_a` with the
//! complex mechanical response
//!
//! ```text
//! M(I_b) = (iω_m + γ_m/2)·(1 + I_b(β₁ + iβ₂))
//! ```
//!
//! which yields the closed parametric chain in the phonon intensity I_b used
//! by [`bistability_curve`]: I_a²·g_a² = I_b·|M|², and the pump power follows
//! from |ε|² = I_a(Δ_f² + κ_a²/4). The curve is generated parametrically in
//! I_b rather than by root-finding in P so the unstable middle branch and the
//! turning points come out without any bracketing trouble.

use crate::model::{DerivedParams, SystemParams};
use crate::C64;
use thiserror::Error;

/// Residual target for every reported mean-field solution.
pub const RESIDUAL_TOL: f64 = 1e-10;

/// Damping factor of the fixed-point iteration.
const FP_DAMPING: f64 = 0.5;
/// Iteration cap of the fixed-point solver.
const FP_MAX_ITER: usize = 100_000;

/// Relative pump-power tolerance of refined turning points.
const TURNING_P_TOL: f64 = 1e-4;

#[derive(Debug, Error)]
pub enum SteadyStateError {
    #[error("fixed-point iteration did not converge; best relative residual {best_residual:.3e}")]
    NoConvergence { best_residual: f64 },
    #[error("intensity grid must be strictly increasing and positive")]
    InvalidGrid,
    #[error("no steady-state intensity root found for the requested drive")]
    NoRoot,
}

/// Self-consistent complex mean fields at one operating point.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanFields {
    pub a_mean: C64,
    pub b_mean: C64,
    pub c_mean: C64,
    /// Effective detuning Δ_f = Δ_a + 2 g_a Re⟨b⟩, rad/s.
    pub delta_f: f64,
    pub i_a: f64,
    pub i_b: f64,
    pub i_c: f64,
}

impl MeanFields {
    fn new(a: C64, b: C64, c: C64, delta_a: f64, g_a: f64) -> Self {
        MeanFields {
            a_mean: a,
            b_mean: b,
            c_mean: c,
            delta_f: delta_a + 2.0 * g_a * b.re,
            i_a: a.norm_sqr(),
            i_b: b.norm_sqr(),
            i_c: c.norm_sqr(),
        }
    }
}

/// Branch label along the hysteresis curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Lower,
    Middle,
    Upper,
}

impl Branch {
    pub fn as_str(self) -> &'static str {
        match self {
            Branch::Lower => "lower",
            Branch::Middle => "middle",
            Branch::Upper => "upper",
        }
    }
}

/// One point of the parametric bistability curve.
#[derive(Debug, Clone, PartialEq)]
pub struct BistabilityPoint {
    /// Pump power in the configuration's power convention, W.
    pub power: f64,
    pub i_a: f64,
    pub i_b: f64,
    pub branch: Branch,
    /// Classical slope criterion: middle branch is unstable.
    pub stable_hint: bool,
    pub f_factor: f64,
}

/// A refined turning point of the curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TurningPoint {
    pub power: f64,
    pub i_b: f64,
}

/// β₁, β₂ of the mechanical response M(I_b).
fn betas(d: &DerivedParams, p: &SystemParams) -> (f64, f64) {
    let w = p.omega_m * p.omega_m + (p.gamma_m / 2.0) * (p.gamma_m / 2.0);
    let u = p.omega_c * p.omega_c + (p.kappa_c / 2.0) * (p.kappa_c / 2.0);
    let a2 = d.alpha * d.alpha;
    let beta1 = 2.0 * a2 * (p.omega_m * p.omega_c - p.gamma_m * p.kappa_c / 4.0) / (w * u);
    let beta2 = a2 * (p.omega_m * p.kappa_c + p.omega_c * p.gamma_m) / (w * u);
    (beta1, beta2)
}

/// The factor F(I_b) multiplying the radiation-pressure detuning shift.
/// Reduces to 1 at α = 0 or I_b = 0.
pub fn f_factor(i_b: f64, d: &DerivedParams, p: &SystemParams) -> f64 {
    debug_assert!(i_b >= 0.0);
    let (b1, b2) = betas(d, p);
    let s = (1.0 + b1 * i_b).powi(2) + (b2 * i_b).powi(2);
    ((1.0 + b1 * i_b) + (p.gamma_m / (2.0 * p.omega_m)) * b2 * i_b) / s
}

/// Everything the parametric chain determines at a given phonon intensity.
#[derive(Debug, Clone, Copy)]
struct ParametricPoint {
    i_b: f64,
    i_a: f64,
    delta_f: f64,
    f_factor: f64,
    eps_drive_sq: f64,
}

fn parametric_point(i_b: f64, d: &DerivedParams, p: &SystemParams) -> ParametricPoint {
    let w = p.omega_m * p.omega_m + (p.gamma_m / 2.0) * (p.gamma_m / 2.0);
    let (b1, b2) = betas(d, p);
    let s = (1.0 + b1 * i_b).powi(2) + (b2 * i_b).powi(2);
    let i_a = if p.g_a > 0.0 {
        (i_b * w * s).sqrt() / p.g_a
    } else {
        0.0
    };
    let f = ((1.0 + b1 * i_b) + (p.gamma_m / (2.0 * p.omega_m)) * b2 * i_b) / s;
    let delta_f = d.delta_a - 2.0 * p.g_a * p.g_a * p.omega_m * f * i_a / w;
    let eps_drive_sq = i_a * (delta_f * delta_f + (p.kappa_a / 2.0) * (p.kappa_a / 2.0));
    ParametricPoint {
        i_b,
        i_a,
        delta_f,
        f_factor: f,
        eps_drive_sq,
    }
}

/// Full complex mean fields at a parametric point, for a real positive drive.
fn fields_at(pt: &ParametricPoint, d: &DerivedParams, p: &SystemParams) -> MeanFields {
    let eps = pt.eps_drive_sq.sqrt();
    let a = C64::new(eps, 0.0) / C64::new(p.kappa_a / 2.0, pt.delta_f);
    let (b1, b2) = betas(d, p);
    let m = C64::new(p.gamma_m / 2.0, p.omega_m) * C64::new(1.0 + b1 * pt.i_b, b2 * pt.i_b);
    let b = if p.g_a > 0.0 {
        C64::new(0.0, -p.g_a * pt.i_a) / m
    } else {
        C64::new(0.0, 0.0)
    };
    let c = C64::new(0.0, d.alpha) * b * b / C64::new(p.kappa_c / 2.0, p.omega_c);
    MeanFields::new(a, b, c, d.delta_a, p.g_a)
}

/// Normalized residuals of the three fixed-point equations; each scaled by the
/// largest term magnitude in its own equation.
pub fn residual(m: &MeanFields, d: &DerivedParams, p: &SystemParams) -> f64 {
    let eps = C64::new(d.epsilon_drive, 0.0);
    let delta_f = d.delta_a + 2.0 * p.g_a * m.b_mean.re;
    let ra = C64::new(p.kappa_a / 2.0, delta_f) * m.a_mean - eps;
    let rb = C64::new(p.gamma_m / 2.0, p.omega_m) * m.b_mean
        + C64::new(0.0, p.g_a * m.i_a)
        + C64::new(0.0, 2.0 * d.alpha) * m.c_mean * m.b_mean.conj();
    let rc = C64::new(p.kappa_c / 2.0, p.omega_c) * m.c_mean
        - C64::new(0.0, d.alpha) * m.b_mean * m.b_mean;
    let sa = d
        .epsilon_drive
        .max(m.a_mean.norm() * (delta_f.abs() + p.kappa_a))
        .max(f64::MIN_POSITIVE);
    let sb = (m.b_mean.norm() * p.omega_m)
        .max(p.g_a * m.i_a)
        .max(2.0 * d.alpha.abs() * m.c_mean.norm() * m.b_mean.norm())
        .max(f64::MIN_POSITIVE);
    let sc = (m.c_mean.norm() * p.omega_c)
        .max(d.alpha.abs() * m.i_b)
        .max(f64::MIN_POSITIVE);
    (ra.norm() / sa).max(rb.norm() / sb).max(rc.norm() / sc)
}

/// Damped fixed-point iteration from the zero-field start.
///
/// On multivalued regions this converges to the branch continuously connected
/// to the undriven solution; use [`bistability_curve`] for the full set.
pub fn mean_fields_fixed_point(
    d: &DerivedParams,
    p: &SystemParams,
) -> Result<MeanFields, SteadyStateError> {
    let eps = C64::new(d.epsilon_drive, 0.0);
    let mut a = C64::new(0.0, 0.0);
    let mut b = C64::new(0.0, 0.0);
    let mut c = C64::new(0.0, 0.0);
    let denom_b = C64::new(p.gamma_m / 2.0, p.omega_m);
    let denom_c = C64::new(p.kappa_c / 2.0, p.omega_c);
    let mut best = f64::INFINITY;
    for _ in 0..FP_MAX_ITER {
        let delta_f = d.delta_a + 2.0 * p.g_a * b.re;
        let a_new = eps / C64::new(p.kappa_a / 2.0, delta_f);
        let c_new = C64::new(0.0, d.alpha) * b * b / denom_c;
        let b_new = (C64::new(0.0, -p.g_a * a.norm_sqr())
            - C64::new(0.0, 2.0 * d.alpha) * c * b.conj())
            / denom_b;
        a = a * (1.0 - FP_DAMPING) + a_new * FP_DAMPING;
        b = b * (1.0 - FP_DAMPING) + b_new * FP_DAMPING;
        c = c * (1.0 - FP_DAMPING) + c_new * FP_DAMPING;
        let m = MeanFields::new(a, b, c, d.delta_a, p.g_a);
        let r = residual(&m, d, p);
        best = best.min(r);
        if r < RESIDUAL_TOL {
            return Ok(m);
        }
    }
    Err(SteadyStateError::NoConvergence {
        best_residual: best,
    })
}

/// All steady-state phonon intensities at the derived drive amplitude,
/// ascending. One root when monostable, three inside a bistable window.
pub fn intensity_roots(d: &DerivedParams, p: &SystemParams) -> Vec<f64> {
    let target = d.epsilon_drive * d.epsilon_drive;
    if target == 0.0 || p.g_a == 0.0 {
        return vec![0.0];
    }
    // Bracket on a wide log grid. The curve is smooth and has at most two
    // turning points, so sign changes of eps^2(I_b) - target bracket every root.
    let (lo, hi, n) = (1e-12f64, 1e18f64, 12_000);
    let mut roots = Vec::new();
    let step = (hi / lo).ln() / (n as f64);
    let mut prev_ib = lo;
    let mut prev = parametric_point(prev_ib, d, p).eps_drive_sq - target;
    if prev == 0.0 {
        roots.push(prev_ib);
    }
    for k in 1..=n {
        let ib = lo * ((k as f64) * step).exp();
        let cur = parametric_point(ib, d, p).eps_drive_sq - target;
        if cur == 0.0 {
            roots.push(ib);
        } else if (prev > 0.0) != (cur > 0.0) {
            let (mut a, mut b) = (prev_ib, ib);
            let sa = prev > 0.0;
            for _ in 0..200 {
                let m = (a * b).sqrt();
                let fm = parametric_point(m, d, p).eps_drive_sq - target;
                if (fm > 0.0) == sa {
                    a = m;
                } else {
                    b = m;
                }
                if b / a - 1.0 < 1e-15 {
                    break;
                }
            }
            roots.push((a * b).sqrt());
        }
        prev = cur;
        prev_ib = ib;
    }
    roots
}

/// Mean fields on the branch continuously connected to the undriven solution:
/// the lowest-intensity root of the parametric curve. Agrees with
/// [`mean_fields_fixed_point`] wherever the iteration converges.
pub fn mean_fields_zero_field_branch(
    d: &DerivedParams,
    p: &SystemParams,
) -> Result<MeanFields, SteadyStateError> {
    if d.epsilon_drive == 0.0 {
        let zero = C64::new(0.0, 0.0);
        return Ok(MeanFields::new(zero, zero, zero, d.delta_a, p.g_a));
    }
    if p.g_a == 0.0 {
        // decoupled cavity: closed form
        let a = C64::new(d.epsilon_drive, 0.0) / C64::new(p.kappa_a / 2.0, d.delta_a);
        let zero = C64::new(0.0, 0.0);
        return Ok(MeanFields::new(a, zero, zero, d.delta_a, p.g_a));
    }
    let roots = intensity_roots(d, p);
    let ib = *roots.first().ok_or(SteadyStateError::NoRoot)?;
    let pt = parametric_point(ib, d, p);
    // rescale the drive-implied point to the exact requested amplitude
    let m = fields_at(&pt, d, p);
    debug_assert!(
        (pt.eps_drive_sq.sqrt() / d.epsilon_drive - 1.0).abs() < 1e-10,
        "root refinement drift"
    );
    Ok(m)
}

/// Parametric construction of the full S-curve over a strictly increasing,
/// positive phonon-intensity grid. Branch labels come from turning-point
/// segmentation; `stable_hint` is the classical slope criterion.
pub fn bistability_curve(
    d: &DerivedParams,
    p: &SystemParams,
    i_b_grid: &[f64],
) -> Result<Vec<BistabilityPoint>, SteadyStateError> {
    if i_b_grid.is_empty() || i_b_grid[0] <= 0.0 {
        return Err(SteadyStateError::InvalidGrid);
    }
    if i_b_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(SteadyStateError::InvalidGrid);
    }
    let pts: Vec<ParametricPoint> = i_b_grid
        .iter()
        .map(|&ib| parametric_point(ib, d, p))
        .collect();
    let turnings = turning_points_from(&pts, d, p);
    let mut out = Vec::with_capacity(pts.len());
    for pt in &pts {
        let branch = match turnings.len() {
            2 => {
                if pt.i_b < turnings[0].i_b {
                    Branch::Lower
                } else if pt.i_b <= turnings[1].i_b {
                    Branch::Middle
                } else {
                    Branch::Upper
                }
            }
            _ => Branch::Lower,
        };
        out.push(BistabilityPoint {
            power: p.power_from_drive_sq(pt.eps_drive_sq),
            i_a: pt.i_a,
            i_b: pt.i_b,
            branch,
            stable_hint: branch != Branch::Middle,
            f_factor: pt.f_factor,
        });
    }
    Ok(out)
}

fn turning_points_from(
    pts: &[ParametricPoint],
    d: &DerivedParams,
    p: &SystemParams,
) -> Vec<TurningPoint> {
    let mut out = Vec::new();
    if pts.len() < 3 {
        return out;
    }
    let deriv_sign = |ib: f64| -> f64 {
        let h = ib * 1e-7;
        let up = parametric_point(ib + h, d, p).eps_drive_sq;
        let dn = parametric_point(ib - h, d, p).eps_drive_sq;
        up - dn
    };
    for i in 1..pts.len() - 1 {
        let d1 = pts[i].eps_drive_sq - pts[i - 1].eps_drive_sq;
        let d2 = pts[i + 1].eps_drive_sq - pts[i].eps_drive_sq;
        if d1 == 0.0 || d2 == 0.0 || (d1 > 0.0) == (d2 > 0.0) {
            continue;
        }
        // bisect the derivative sign change to the requested power tolerance
        let (mut lo, mut hi) = (pts[i - 1].i_b, pts[i + 1].i_b);
        let s_lo = deriv_sign(lo) > 0.0;
        for _ in 0..200 {
            let mid = (lo * hi).sqrt();
            if (deriv_sign(mid) > 0.0) == s_lo {
                lo = mid;
            } else {
                hi = mid;
            }
            let p_lo = parametric_point(lo, d, p).eps_drive_sq;
            let p_hi = parametric_point(hi, d, p).eps_drive_sq;
            if (p_hi - p_lo).abs() <= TURNING_P_TOL * p_lo.abs().max(p_hi.abs()) {
                break;
            }
        }
        let ib = (lo * hi).sqrt();
        out.push(TurningPoint {
            power: p.power_from_drive_sq(parametric_point(ib, d, p).eps_drive_sq),
            i_b: ib,
        });
    }
    out
}

/// Locate the turning points of a computed curve, refined by bisection on the
/// parametric derivative. Empty for a monostable curve.
pub fn turning_points(
    curve: &[BistabilityPoint],
    d: &DerivedParams,
    p: &SystemParams,
) -> Vec<TurningPoint> {
    let pts: Vec<ParametricPoint> = curve
        .iter()
        .map(|b| parametric_point(b.i_b, d, p))
        .collect();
    turning_points_from(&pts, d, p)
}

/// Max relative deviation of the curve from the decoupled phonon–photon
/// relation I_a² g_a² = I_b (ω_m² + (γ_m/2)²); exact at α = 0.
pub fn phonon_photon_relation_check(
    curve: &[BistabilityPoint],
    _d: &DerivedParams,
    p: &SystemParams,
) -> f64 {
    let w = p.omega_m * p.omega_m + (p.gamma_m / 2.0) * (p.gamma_m / 2.0);
    curve
        .iter()
        .map(|pt| (pt.i_a * pt.i_a * p.g_a * p.g_a / (pt.i_b * w) - 1.0).abs())
        .fold(0.0, f64::max)
}

/// Mean fields on the bistability curve at a given phonon intensity. The drive
/// amplitude is the one implied by the parametric relation at that point.
pub fn mean_fields_on_curve(i_b: f64, d: &DerivedParams, p: &SystemParams) -> MeanFields {
    fields_at(&parametric_point(i_b, d, p), d, p)
}
