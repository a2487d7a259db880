//! Clustering toolkit for mixture data whose coordinates are driven by a
//! small number of latent factors.
//!
//! The factor component inflates the covariance along a few directions and
//! drowns the cluster geometry, which breaks plain spectral clustering. The
//! factor-adjusted variant estimates the factor subspace by PCA, projects
//! it out, and spectral-clusters the residuals. This crate ships:
//!
//! * [`dataset`] — the data model, the synthetic mixture generator and CSV
//!   ingestion for real datasets;
//! * [`numerics`] — symmetric eigendecomposition, singular subspaces,
//!   projectors and subspace distances;
//! * [`kmeans`] — seeded, restarted Lloyd iteration with `++`-style
//!   initialization;
//! * [`clustering`] — the interchangeable algorithms behind one trait:
//!   raw K-means, spectral, cross-fitted spectral and the factor-adjusted
//!   variant, selectable by name;
//! * [`analysis`] — exact permutation-invariant mislabeling, the
//!   signal-to-noise family, assumption diagnostics and scree spectra;
//! * [`harness`] — a config-driven experiment runner producing CSV
//!   artifacts with replicate-local seeding.

pub mod analysis;
pub(crate) mod assignment;
pub mod clustering;
pub mod dataset;
pub mod error;
pub mod harness;
pub mod kmeans;
pub mod numerics;
pub(crate) mod seeds;

pub use error::{Error, Result};
