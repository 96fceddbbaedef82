//! Steady covariance by integrating the flow dV/dt = R V + V Rᵀ + D from
//! V(0) = 0, instead of solving the algebraic Lyapunov equation.
//!
//! The flow has the closed form V(t) = ∫₀ᵗ e^{Rs} D e^{Rᵀs} ds, which obeys
//! the doubling identity V(2t) = V(t) + M V(t) Mᵀ with M = e^{Rt}. The
//! integrator seeds V on a short interval by panelled Gauss–Legendre
//! quadrature and doubles until stationary, handling the huge stiffness ratio
//! (mode frequencies vs mechanical damping) with exact exponentials. The seed
//! interval is kept as long as quadrature accuracy allows: rounding grows
//! with the doubling count, and a longer seed keeps the worst-case
//! disagreement with the algebraic solve near 1e-7. All matrix arithmetic is
//! local to this module.

use crate::OracleError;
use nalgebra::Matrix6;

type M6 = [[f64; 6]; 6];

fn zero() -> M6 {
    [[0.0; 6]; 6]
}

fn identity() -> M6 {
    let mut m = zero();
    for (k, row) in m.iter_mut().enumerate() {
        row[k] = 1.0;
    }
    m
}

fn matmul(a: &M6, b: &M6) -> M6 {
    let mut out = zero();
    for i in 0..6 {
        for k in 0..6 {
            let aik = a[i][k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..6 {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

fn mat_add(a: &M6, b: &M6) -> M6 {
    let mut out = *a;
    for i in 0..6 {
        for j in 0..6 {
            out[i][j] += b[i][j];
        }
    }
    out
}

fn mat_scale(a: &M6, s: f64) -> M6 {
    let mut out = *a;
    for row in out.iter_mut() {
        for x in row.iter_mut() {
            *x *= s;
        }
    }
    out
}

fn transpose(a: &M6) -> M6 {
    let mut out = zero();
    for i in 0..6 {
        for j in 0..6 {
            out[i][j] = a[j][i];
        }
    }
    out
}

fn max_abs(a: &M6) -> f64 {
    a.iter().flatten().fold(0.0f64, |acc, &x| acc.max(x.abs()))
}

/// exp(A) by scaling-and-squaring with a Taylor series on the scaled matrix.
fn expm(a: &M6) -> M6 {
    let norm = max_abs(a);
    let mut squarings = 0u32;
    let mut scale = 1.0;
    while norm * scale > 0.25 && squarings < 64 {
        scale *= 0.5;
        squarings += 1;
    }
    let a_s = mat_scale(a, scale);
    let mut term = identity();
    let mut sum = identity();
    for k in 1..=20 {
        term = mat_scale(&matmul(&term, &a_s), 1.0 / k as f64);
        sum = mat_add(&sum, &term);
        if max_abs(&term) < 1e-18 * max_abs(&sum) {
            break;
        }
    }
    let mut out = sum;
    for _ in 0..squarings {
        out = matmul(&out, &out);
    }
    out
}

/// e^{Rs} D e^{Rᵀs} at a given s, the integrand of the covariance flow.
fn flow_integrand(r: &M6, d: &M6, s: f64) -> M6 {
    let m = expm(&mat_scale(r, s));
    matmul(&matmul(&m, d), &transpose(&m))
}

fn to_array(m: &Matrix6<f64>) -> M6 {
    let mut out = zero();
    for i in 0..6 {
        for j in 0..6 {
            out[i][j] = m[(i, j)];
        }
    }
    out
}

fn to_matrix(m: &M6) -> Matrix6<f64> {
    let mut out = Matrix6::zeros();
    for i in 0..6 {
        for j in 0..6 {
            out[(i, j)] = m[i][j];
        }
    }
    out
}

/// Integrate the covariance flow to stationarity. Errors with
/// [`OracleError::Timeout`] when the doubling fails to converge (marginally
/// stable drift) and [`OracleError::UnstableDrift`] when the flow diverges.
pub fn lyapunov_by_integration(
    r_in: &Matrix6<f64>,
    d_in: &Matrix6<f64>,
) -> Result<Matrix6<f64>, OracleError> {
    let r = to_array(r_in);
    let d = to_array(d_in);
    let d_norm = max_abs(&d);
    if d_norm == 0.0 {
        // no noise: the damped flow relaxes to zero
        return Ok(Matrix6::zeros());
    }
    // seed interval: a tenth of the fastest timescale
    let t0 = 0.1 / max_abs(&r).max(f64::MIN_POSITIVE);
    // composite 5-point Gauss-Legendre on [0, t0]
    const GL_X: [f64; 5] = [
        -0.906_179_845_938_664,
        -0.538_469_310_105_683,
        0.0,
        0.538_469_310_105_683,
        0.906_179_845_938_664,
    ];
    const GL_W: [f64; 5] = [
        0.236_926_885_056_189,
        0.478_628_670_499_366,
        0.568_888_888_888_889,
        0.478_628_670_499_366,
        0.236_926_885_056_189,
    ];
    let n_panels = 256;
    let h = t0 / n_panels as f64;
    let mut v = zero();
    for k in 0..n_panels {
        let mid = (k as f64 + 0.5) * h;
        for (x, w) in GL_X.iter().zip(GL_W.iter()) {
            let s = mid + 0.5 * h * x;
            let f = flow_integrand(&r, &d, s);
            v = mat_add(&v, &mat_scale(&f, 0.5 * h * w));
        }
    }
    let mut m = expm(&mat_scale(&r, t0));
    // doubling: V(2t) = V(t) + M V Mᵀ; M <- M²
    for _ in 0..120 {
        let grown = matmul(&matmul(&m, &v), &transpose(&m));
        let v_next = mat_add(&v, &grown);
        m = matmul(&m, &m);
        let delta = max_abs(&grown);
        let scale = max_abs(&v_next);
        if !scale.is_finite() {
            return Err(OracleError::UnstableDrift);
        }
        v = v_next;
        if delta < 1e-14 * scale && max_abs(&m) < 1e-9 {
            // symmetrize rounding noise
            let vt = transpose(&v);
            return Ok(to_matrix(&mat_scale(&mat_add(&v, &vt), 0.5)));
        }
    }
    Err(OracleError::Timeout)
}
