//! Check outcome record shared by all oracles.

/// Result of one verification check.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub check_name: String,
    pub max_abs_error: f64,
    pub max_rel_error: f64,
    pub n_points: usize,
    pub pass: bool,
    pub notes: String,
}

impl VerificationReport {
    pub fn new(
        check_name: impl Into<String>,
        max_abs_error: f64,
        max_rel_error: f64,
        n_points: usize,
        threshold: f64,
        notes: impl Into<String>,
    ) -> Self {
        VerificationReport {
            check_name: check_name.into(),
            max_abs_error,
            max_rel_error,
            n_points,
            pass: max_rel_error < threshold,
            notes: notes.into(),
        }
    }
}

impl std::fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "[{}] {}: max_rel={:.3e} max_abs={:.3e} over {} points{}",
            if self.pass { "PASS" } else { "FAIL" },
            self.check_name,
            self.max_rel_error,
            self.max_abs_error,
            self.n_points,
            if self.notes.is_empty() {
                String::new()
            } else {
                format!(" ({})", self.notes)
            }
        )
    }
}
