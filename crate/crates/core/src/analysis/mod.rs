//! End-to-end pipelines: per-cut separability screening, randomized audits
//! and fingerprint comparison.

mod audit;
mod fingerprint;
mod screen;
mod theorem5;

pub use audit::{lu_covariance_audit, lu_covariance_audit_with, AuditReport};
pub use fingerprint::{compare_fingerprints, compare_fingerprints_with, FingerprintComparison};
pub use screen::{
    default_ks, separability_screen, separability_screen_with, CutReport, LocusOutcome, LocusResult, ScreenReport,
    ScreenVerdict,
};
pub use theorem5::{theorem5_check_state, theorem5_experiment, Theorem5Report, Theorem5Trial};

use crate::locus::{LinearityOptions, Convention, TAU_RANK};
use crate::states::FINGERPRINT_TOL;

/// Tolerances and trial counts shared by the pipelines.
#[derive(Clone, Debug)]
pub struct AnalysisConfig {
    /// Relative rank threshold of every locus.
    pub tau_rank: f64,
    /// Partial-transpose eigenvalues above `-ppt_tolerance` count as nonnegative.
    pub ppt_tolerance: f64,
    /// Eigenvalues of a state above this become ensemble members.
    pub eigen_tolerance: f64,
    /// Locus samples drawn per `(cut, k)` before the linearity test.
    pub samples_per_locus: usize,
    /// Points mapped per unitary draw in the covariance audit.
    pub audit_points: usize,
    /// Relative singular-value cutoff for Schmidt ranks.
    pub schmidt_tolerance: f64,
    /// Chordal tolerance for fingerprint comparison.
    pub fingerprint_tolerance: f64,
    /// Largest total dimension accepted by the Schmidt-rank experiment.
    pub max_total_dim: usize,
    pub linearity: LinearityOptions,
    /// Forward convention used by the covariance audit; anything other than
    /// the resolved convention is a negative control.
    pub audit_conventions: Option<Vec<Convention>>,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            tau_rank: TAU_RANK,
            ppt_tolerance: 1e-10,
            eigen_tolerance: 1e-12,
            samples_per_locus: 24,
            audit_points: 100,
            schmidt_tolerance: 1e-10,
            fingerprint_tolerance: FINGERPRINT_TOL,
            max_total_dim: 4096,
            linearity: LinearityOptions::default(),
            audit_conventions: None,
        }
    }
}
