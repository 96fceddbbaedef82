//! Independent brute-force verification paths.
//!
//! Every check here re-derives its answer from the defining equations with
//! its own numerics — plain-array arithmetic, a hand-rolled matrix
//! exponential, Cardano's cubic — and never calls the linear-algebra kernels
//! of the canonical paths it validates.

pub mod cubic;
pub mod lyap_flow;
pub mod report;
pub mod residual;
pub mod suite;
pub mod xi_check;

pub use report::VerificationReport;
pub use suite::{run_standard_checks, FaultInjection};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("covariance flow did not become stationary (near-marginal drift?)")]
    Timeout,
    #[error("flow integration requires a stable drift matrix")]
    UnstableDrift,
}
