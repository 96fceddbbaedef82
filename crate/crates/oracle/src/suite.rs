//! The standard verification suite driven by the command-line `verify`
//! subcommand: every oracle exercised against the canonical paths, plus an
//! optional deliberate fault injection demonstrating that the checks can
//! fail.

use crate::cubic::standard_cubic_intensities;
use crate::lyap_flow::lyapunov_by_integration;
use crate::residual::residual_check;
use crate::xi_check::xi_crosscheck;
use crate::VerificationReport;
use electromech::covariance::{
    diffusion_matrix, drift_matrix, log_negativity, lyapunov_residual, stability,
    steady_covariance, symplectic_eigenvalues, Stability,
};
use electromech::linear_response::SymmetricGrid;
use electromech::model::{derive, QubitState, SystemParams, SystemParamsHz};
use electromech::squeezing::squeezing_spectrum;
use electromech::steady_state::{
    bistability_curve, mean_fields_fixed_point, mean_fields_on_curve, mean_fields_zero_field_branch,
};
use nalgebra::{Matrix4, Matrix6};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Deliberate faults for demonstrating oracle sensitivity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaultInjection {
    None,
    /// Build the diffusion matrix with the mechanical occupation leaking into
    /// the second slot of the a-mode block.
    DiffusionSlot2,
}

fn baseline_hz() -> SystemParamsHz {
    SystemParamsHz {
        f_m: 1e7,
        f_a: 7.5e9,
        f_c: 2.5e9,
        f_q: 3e9,
        f_d: 7e9,
        g_a: 230.0,
        g_b: 2e6,
        g_c: 3e7,
        kappa_a: 1e5,
        kappa_c: 1e5,
        gamma_m: 50.0,
        t_a: 0.15,
        t_b: 0.05,
        t_c: 2.0,
        pump_power: 28e-9,
        drive_power_scale: 1.0,
        qubit_state: QubitState::Ground,
    }
}

fn faulty_diffusion(p: &SystemParams, d: &electromech::model::DerivedParams) -> Matrix6<f64> {
    let mut diff = diffusion_matrix(d, p);
    diff[(1, 1)] = p.kappa_a * (2.0 * d.n_b + 1.0) / 2.0;
    diff
}

fn check_residual_paths() -> Vec<VerificationReport> {
    let mut out = Vec::new();
    // exact closed-form decoupled solution
    let mut hz = baseline_hz();
    hz.g_a = 0.0;
    let p = hz.to_angular().unwrap();
    let d = derive(&p).unwrap();
    let m = mean_fields_zero_field_branch(&d, &p).unwrap();
    let mut rep = residual_check(&m, &d, &p);
    rep.check_name = "residual: decoupled closed form".into();
    out.push(rep);
    // fixed-point output at a driven point
    let mut hz = baseline_hz();
    hz.pump_power = 1e-9;
    let p = hz.to_angular().unwrap();
    let d = derive(&p).unwrap();
    let m = mean_fields_fixed_point(&d, &p).unwrap();
    let mut rep = residual_check(&m, &d, &p);
    rep.check_name = "residual: fixed point at 1 nW".into();
    out.push(rep);
    // perturbation sensitivity: corrupted fields must fail
    let mut bad = m.clone();
    bad.a_mean *= 1.01;
    let rep = residual_check(&bad, &d, &p);
    out.push(VerificationReport {
        check_name: "residual: detects 1% corruption".into(),
        pass: !rep.pass && rep.max_rel_error > 1e-3,
        notes: "pass means the corrupted fields were rejected".into(),
        ..rep
    });
    out
}

fn check_cubic_consistency() -> VerificationReport {
    // alpha = 0 parametric curve against the independent cubic roots
    let mut hz = baseline_hz();
    hz.g_b = 0.0;
    hz.drive_power_scale = 1e12;
    let p = hz.to_angular().unwrap();
    let d = derive(&p).unwrap();
    let grid: Vec<f64> = (0..800)
        .map(|k| 1e8 * (1e13f64 / 1e8).powf(k as f64 / 799.0))
        .collect();
    let curve = bistability_curve(&d, &p, &grid).unwrap();
    let mut max_rel = 0.0f64;
    let mut max_abs = 0.0f64;
    for pt in &curve {
        let eps_sq = pt.power * p.drive_power_scale * 2.0 * p.kappa_a
            / (electromech::consts::HBAR * p.omega_a);
        let roots = standard_cubic_intensities(&d, &p, eps_sq);
        let best = roots
            .iter()
            .map(|r| (r - pt.i_a).abs())
            .fold(f64::INFINITY, f64::min);
        max_abs = max_abs.max(best);
        max_rel = max_rel.max(best / pt.i_a);
    }
    VerificationReport::new(
        "bistability: parametric curve vs cubic roots (alpha = 0)",
        max_abs,
        max_rel,
        curve.len(),
        1e-8,
        "",
    )
}

fn random_stable_draw(
    rng: &mut ChaCha8Rng,
) -> Option<(SystemParams, electromech::model::DerivedParams)> {
    let mut hz = baseline_hz();
    hz.f_d = hz.f_a - 10f64.powf(rng.random_range(4.0..7.2));
    hz.pump_power = 10f64.powf(rng.random_range(-8.0..-5.0));
    hz.drive_power_scale = 1e-6;
    hz.t_a = rng.random_range(0.0..0.3);
    hz.t_b = rng.random_range(0.0..0.3);
    hz.t_c = rng.random_range(0.0..2.0);
    let p = hz.to_angular().ok()?;
    let d = derive(&p).ok()?;
    let m = mean_fields_zero_field_branch(&d, &p).ok()?;
    let r = drift_matrix(&d, &m, &p);
    (stability(&r, &p) == Stability::Stable).then_some((p, d))
}

fn check_lyapunov_flow(n_draws: usize, fault: FaultInjection) -> VerificationReport {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut max_rel = 0.0f64;
    let mut max_abs = 0.0f64;
    let mut n = 0;
    let mut attempts = 0;
    while n < n_draws && attempts < 50 * n_draws {
        attempts += 1;
        let Some((p, d)) = random_stable_draw(&mut rng) else {
            continue;
        };
        let m = mean_fields_zero_field_branch(&d, &p).unwrap();
        let r = drift_matrix(&d, &m, &p);
        let diff = match fault {
            FaultInjection::None => diffusion_matrix(&d, &p),
            FaultInjection::DiffusionSlot2 => faulty_diffusion(&p, &d),
        };
        let v_solve = match steady_covariance(&r, &diffusion_matrix(&d, &p), &p) {
            Ok(v) => v,
            Err(_) => continue,
        };
        let Ok(v_flow) = lyapunov_by_integration(&r, &diff) else {
            continue;
        };
        n += 1;
        let scale = v_solve.amax();
        let abs = (v_flow - v_solve).amax();
        max_abs = max_abs.max(abs);
        max_rel = max_rel.max(abs / scale);
    }
    VerificationReport::new(
        "covariance: Lyapunov solve vs flow integration",
        max_abs,
        max_rel,
        n,
        1e-6,
        match fault {
            FaultInjection::None => String::new(),
            FaultInjection::DiffusionSlot2 => {
                "fault injected: a-mode Y slot carries the mechanical occupation".into()
            }
        },
    )
}

fn check_lyapunov_residuals() -> VerificationReport {
    let mut hz = baseline_hz();
    hz.pump_power = 1e-6;
    hz.drive_power_scale = 1e-6;
    hz.f_d = hz.f_a - 1e5;
    let p = hz.to_angular().unwrap();
    let d = derive(&p).unwrap();
    let m = mean_fields_zero_field_branch(&d, &p).unwrap();
    let r = drift_matrix(&d, &m, &p);
    let diff = diffusion_matrix(&d, &p);
    let v = steady_covariance(&r, &diff, &p).unwrap();
    let res = lyapunov_residual(&r, &v, &diff);
    let nu = symplectic_eigenvalues(&v.fixed_view::<4, 4>(0, 0).into_owned());
    let physical = nu[0] >= 0.5 - 1e-9;
    VerificationReport {
        check_name: "covariance: residual and physicality".into(),
        max_abs_error: res,
        max_rel_error: res,
        n_points: 1,
        pass: res < 1e-9 && physical,
        notes: format!("nu_min = {:.6}", nu[0]),
    }
}

fn check_thermal_covariance(fault: FaultInjection) -> VerificationReport {
    let mut hz = baseline_hz();
    hz.g_a = 0.0;
    hz.g_b = 0.0;
    hz.pump_power = 0.0;
    let p = hz.to_angular().unwrap();
    let d = derive(&p).unwrap();
    let zero = electromech::Complex::new(0.0, 0.0);
    let m = electromech::steady_state::MeanFields {
        a_mean: zero,
        b_mean: zero,
        c_mean: zero,
        delta_f: d.delta_a,
        i_a: 0.0,
        i_b: 0.0,
        i_c: 0.0,
    };
    let r = drift_matrix(&d, &m, &p);
    let diff = match fault {
        FaultInjection::None => diffusion_matrix(&d, &p),
        FaultInjection::DiffusionSlot2 => faulty_diffusion(&p, &d),
    };
    let v = steady_covariance(&r, &diff, &p).unwrap();
    let expect = [d.n_a, d.n_a, d.n_b, d.n_b, d.n_c, d.n_c].map(|n| n + 0.5);
    let mut max_rel = 0.0f64;
    let mut max_abs = 0.0f64;
    for k in 0..6 {
        let abs = (v[(k, k)] - expect[k]).abs();
        max_abs = max_abs.max(abs);
        max_rel = max_rel.max(abs / expect[k]);
    }
    VerificationReport::new(
        "covariance: decoupled thermal diagonal",
        max_abs,
        max_rel,
        6,
        1e-8,
        match fault {
            FaultInjection::None => String::new(),
            FaultInjection::DiffusionSlot2 => "fault injected into the diffusion matrix".into(),
        },
    )
}

fn check_tmsv_benchmark() -> VerificationReport {
    let r_sq: f64 = 0.7;
    let ch = (2.0 * r_sq).cosh() / 2.0;
    let sh = (2.0 * r_sq).sinh() / 2.0;
    let mut v4 = Matrix4::zeros();
    for k in 0..4 {
        v4[(k, k)] = ch;
    }
    v4[(0, 2)] = sh;
    v4[(2, 0)] = sh;
    v4[(1, 3)] = -sh;
    v4[(3, 1)] = -sh;
    let e_n = log_negativity(&v4).unwrap();
    let err = (e_n - 2.0 * r_sq).abs();
    VerificationReport::new(
        "entanglement: two-mode squeezed benchmark",
        err,
        err / (2.0 * r_sq),
        1,
        1e-9,
        "expected E_N = 2r",
    )
}

fn check_sql_vacuum() -> VerificationReport {
    let mut hz = baseline_hz();
    hz.g_a = 0.0;
    hz.g_b = 0.0;
    hz.pump_power = 0.0;
    hz.t_a = 0.0;
    hz.t_b = 0.0;
    hz.t_c = 0.0;
    let p = hz.to_angular().unwrap();
    let d = derive(&p).unwrap();
    let m = mean_fields_zero_field_branch(&d, &p).unwrap();
    let grid = SymmetricGrid::symmetric(3.0 * p.omega_m, 401).unwrap();
    let sp = squeezing_spectrum(&d, &m, &p, &grid).unwrap();
    let max_abs = sp
        .iter()
        .map(|pt| (pt.s_minus - 1.0).abs().max((pt.s_plus - 1.0).abs()))
        .fold(0.0f64, f64::max);
    VerificationReport::new(
        "squeezing: vacuum decoupled limit on the SQL",
        max_abs,
        max_abs,
        sp.len(),
        1e-10,
        "",
    )
}

fn check_xi() -> VerificationReport {
    let p = baseline_hz().to_angular().unwrap();
    let d = derive(&p).unwrap();
    let m = mean_fields_on_curve(1e10, &d, &p);
    let grid: Vec<f64> = (-60..=60).map(|k| 0.05 * k as f64 * p.omega_m).collect();
    xi_crosscheck(&d, &m, &p, &grid)
}

/// Run every standard check; all should pass with `FaultInjection::None`,
/// and the diffusion-dependent checks must fail under
/// [`FaultInjection::DiffusionSlot2`].
pub fn run_standard_checks(fault: FaultInjection) -> Vec<VerificationReport> {
    let mut reports = check_residual_paths();
    reports.push(check_cubic_consistency());
    reports.push(check_xi());
    reports.push(check_thermal_covariance(fault));
    reports.push(check_lyapunov_residuals());
    reports.push(check_lyapunov_flow(20, fault));
    reports.push(check_tmsv_benchmark());
    reports.push(check_sql_vacuum());
    reports
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_suite_passes_clean() {
        let reports = run_standard_checks(FaultInjection::None);
        for rep in &reports {
            assert!(rep.pass, "{rep}");
        }
        // the flow comparison must actually have run its draws
        let flow = reports
            .iter()
            .find(|r| r.check_name.contains("flow integration"))
            .unwrap();
        assert_eq!(flow.n_points, 20);
    }

    #[test]
    fn injected_diffusion_fault_is_caught() {
        let reports = run_standard_checks(FaultInjection::DiffusionSlot2);
        let thermal = reports
            .iter()
            .find(|r| r.check_name.contains("thermal diagonal"))
            .unwrap();
        assert!(!thermal.pass, "fault must be detected: {thermal}");
    }
}
