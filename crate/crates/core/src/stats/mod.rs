//! Statistics of ω over many fibres: scans, moments, the truncated count,
//! τ(j, B), σ_p partial sums and the limit prediction for Δ = 0.

mod baseline;
mod moments;
mod scan;
mod sigma;
mod tally;
mod tau;

pub use baseline::{baseline_report, normal_cdf, omega_table, BaselineReport};
pub use moments::{
    gaussian_distance, gaussian_distance_pairs, height_omega, ks_statistic, moment_tally,
    moments, moments_from_tally, normal_moment, phi, standardized_values, truncated_moments,
    truncated_moments_from_tally, truncated_omega, window_count, Centering, Histogram,
    MomentReport, TruncationWindow, MIN_HEIGHT,
};
pub use scan::{sample_fold, scan, scan_fold, ScanSummary, RNG_NAME, SAMPLE_BATCH};
pub use sigma::{sigma_partial_sums, BetaFit, SigmaEntry, SigmaTable};
pub use tally::{n_moments, n_moments_f64, n_moments_tally, tau_histogram, OmegaTally, TauHistogram};
pub use tau::{tau_limit_prediction, DensitySource, TauPrediction};

pub use crate::families::ObstructionRecord;
