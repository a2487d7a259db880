//! Evaluation metrics, signal-to-noise quantities, the oracle classifier
//! and assumption diagnostics.

mod assumptions;
mod metrics;
pub mod normal;
mod snr;

pub use assumptions::{
    assumption_report, scree, spectral_conditions, AssumptionOptions, AssumptionReport,
    SpectralConditionReport,
};
pub use metrics::{mislabeling, mislabeling_exhaustive, mislabeling_matching};
pub use snr::{optimal_bayes_labels, snr_report, SnrReport};
