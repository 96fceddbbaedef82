//! Substitution residual of the mean-field fixed-point equations, written out
//! from scratch against the defining equations (no code shared with the
//! steady-state solver's own convergence check).

use crate::VerificationReport;
use electromech::model::{DerivedParams, SystemParams};
use electromech::steady_state::MeanFields;

/// Oracle tolerances run 100x looser than the canonical paths' internal
/// targets to keep integration/rounding noise from producing false failures.
pub const RESIDUAL_PASS_THRESHOLD: f64 = 1e-8;

fn cmul(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
}

fn cnorm(a: (f64, f64)) -> f64 {
    a.0.hypot(a.1)
}

/// Substitute the fields into the three steady-state equations and report the
/// worst normalized residual.
pub fn residual_check(m: &MeanFields, d: &DerivedParams, p: &SystemParams) -> VerificationReport {
    let a = (m.a_mean.re, m.a_mean.im);
    let b = (m.b_mean.re, m.b_mean.im);
    let c = (m.c_mean.re, m.c_mean.im);
    let i_a = a.0 * a.0 + a.1 * a.1;
    let i_b = b.0 * b.0 + b.1 * b.1;
    let delta_f = d.delta_a + 2.0 * p.g_a * b.0;

    // (kappa_a/2 + i delta_f) <a> - eps
    let ra = {
        let lhs = cmul((p.kappa_a / 2.0, delta_f), a);
        (lhs.0 - d.epsilon_drive, lhs.1)
    };
    // (gamma_m/2 + i omega_m) <b> + i g_a I_a + 2 i alpha <c><b*>
    let rb = {
        let t1 = cmul((p.gamma_m / 2.0, p.omega_m), b);
        let cbconj = cmul(c, (b.0, -b.1));
        (
            t1.0 - 2.0 * d.alpha * cbconj.1,
            t1.1 + p.g_a * i_a + 2.0 * d.alpha * cbconj.0,
        )
    };
    // (kappa_c/2 + i omega_c) <c> - i alpha <b>^2
    let rc = {
        let t1 = cmul((p.kappa_c / 2.0, p.omega_c), c);
        let b2 = cmul(b, b);
        (t1.0 + d.alpha * b2.1, t1.1 - d.alpha * b2.0)
    };

    let sa = d
        .epsilon_drive
        .max(cnorm(a) * (delta_f.abs() + p.kappa_a))
        .max(f64::MIN_POSITIVE);
    let sb = (cnorm(b) * p.omega_m)
        .max(p.g_a * i_a)
        .max(2.0 * d.alpha.abs() * cnorm(c) * cnorm(b))
        .max(f64::MIN_POSITIVE);
    let sc = (cnorm(c) * p.omega_c)
        .max(d.alpha.abs() * i_b)
        .max(f64::MIN_POSITIVE);

    let abs = cnorm(ra).max(cnorm(rb)).max(cnorm(rc));
    let rel = (cnorm(ra) / sa).max(cnorm(rb) / sb).max(cnorm(rc) / sc);
    VerificationReport::new(
        "steady-state residual",
        abs,
        rel,
        3,
        RESIDUAL_PASS_THRESHOLD,
        "",
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use electromech::model::{derive, QubitState, SystemParamsHz};
    use electromech::steady_state::{mean_fields_fixed_point, mean_fields_zero_field_branch};

    fn baseline_hz(power: f64) -> SystemParamsHz {
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
            pump_power: power,
            drive_power_scale: 1.0,
            qubit_state: QubitState::Ground,
        }
    }

    #[test]
    fn exact_decoupled_solution_has_zero_residual() {
        let mut hz = baseline_hz(1e-9);
        hz.g_a = 0.0;
        let p = hz.to_angular().unwrap();
        let d = derive(&p).unwrap();
        let m = mean_fields_zero_field_branch(&d, &p).unwrap();
        let rep = residual_check(&m, &d, &p);
        assert!(rep.pass);
        assert!(
            rep.max_rel_error < 1e-14,
            "closed form: {}",
            rep.max_rel_error
        );
    }

    #[test]
    fn fixed_point_output_passes() {
        let p = baseline_hz(1e-9).to_angular().unwrap();
        let d = derive(&p).unwrap();
        let m = mean_fields_fixed_point(&d, &p).unwrap();
        let rep = residual_check(&m, &d, &p);
        assert!(rep.pass);
        assert!(rep.max_rel_error < 1e-10);
    }

    #[test]
    fn perturbed_fields_are_detected() {
        let p = baseline_hz(1e-9).to_angular().unwrap();
        let d = derive(&p).unwrap();
        let mut m = mean_fields_fixed_point(&d, &p).unwrap();
        m.a_mean *= 1.01;
        let rep = residual_check(&m, &d, &p);
        assert!(!rep.pass);
        assert!(rep.max_rel_error > 1e-3);
    }
}
