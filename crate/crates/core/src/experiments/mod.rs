//! Experiment drivers: speed estimates and ballisticity scans, step-length
//! scaling sweeps with exponent fits, and the geometric study suites.
//!
//! Every driver fans out over sizes or replicas with rayon; each task owns
//! its random stream, and results are gathered in input order.

mod estimates;
mod scaling;
mod studies;

pub use estimates::{
    ballisticity_scan, displacement_estimate, sample_displacements, sample_walks, scan_csv, speed_estimate, ScanRow,
    WalkSample, MIN_SAMPLES, SCAN_HEADER,
};
pub use scaling::{
    beta_fit, displacement_on_scaled_space, rescaling_identity_error, scaling_csv, scaling_sweep, BetaFit, EpsRule,
    Normalization, ScalingPoint, SCALING_HEADER,
};
pub use studies::{
    ball_packing_statistic, near_geodesic_study, run_verification, surface_density_study, DensityReport,
    NearGeodesicReport, Suite, SuiteResult, VerificationReport, VerifyConfig,
};
