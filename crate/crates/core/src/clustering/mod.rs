//! The interchangeable clustering algorithms, each behind the
//! [`ClusterAlgorithm`] trait and selectable by registry name:
//!
//! * `kmeans_raw` — Lloyd on the raw coordinates;
//! * `spectral` — embed onto the top right singular subspace, then K-means;
//! * `crossfit` — spectral with the basis estimated on the opposite half;
//! * `fasc(r=R)` — project out the top-`R` principal directions first,
//!   then spectral-cluster the residuals.
//!
//! Scenario files and the CLI select methods through [`MethodSpec::parse`].

mod crossfit;
mod fasc;
mod raw;
mod spectral;

pub use crossfit::spectral_cluster_crossfit;
pub use fasc::{fasc, FascConfig, SplitMode};
pub use raw::kmeans_raw;
pub use spectral::spectral_cluster;

use ndarray::Array2;

use crate::assignment::min_cost_assignment;
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::kmeans::KMeansConfig;
use crate::numerics::SpectralBasis;

/// Which algorithm produced a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodTag {
    KmeansRaw,
    Spectral,
    SpectralCrossfit,
    Fasc,
}

impl std::fmt::Display for MethodTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            MethodTag::KmeansRaw => "kmeans_raw",
            MethodTag::Spectral => "spectral",
            MethodTag::SpectralCrossfit => "spectral_crossfit",
            MethodTag::Fasc => "fasc",
        };
        f.write_str(s)
    }
}

/// Labels plus the fitted geometry behind them.
#[derive(Debug, Clone)]
pub struct ClusteringResult {
    /// 0-based label per input row, in input order.
    pub labels: Vec<usize>,
    /// `K×k` centers in the embedding coordinates of the primary pass.
    pub embedded_centers: Array2<f64>,
    pub method: MethodTag,
    /// Embedding basis of the primary pass.
    pub basis: Option<SpectralBasis>,
    /// Estimated factor basis (`fasc` only).
    pub factor_basis: Option<SpectralBasis>,
    /// K-means objective (summed over both passes in split modes).
    pub objective: f64,
}

/// A clustering strategy; implementations are pure given `(data, config)`.
pub trait ClusterAlgorithm: Send + Sync {
    /// Registry name, e.g. `fasc(r=3)`.
    fn name(&self) -> String;
    fn cluster(&self, data: &Dataset) -> Result<ClusteringResult>;
}

/// Parameters shared by every method: cluster count, embedding dimension
/// (defaults to the cluster count), split mode and the K-means knobs.
#[derive(Debug, Clone)]
pub struct MethodParams {
    pub clusters: usize,
    pub embed_dim: Option<usize>,
    pub split: SplitMode,
    pub kmeans_restarts: usize,
    pub kmeans_max_iters: usize,
    pub kmeans_tol: f64,
    pub seed: u64,
}

impl MethodParams {
    pub fn new(clusters: usize, seed: u64) -> Self {
        MethodParams {
            clusters,
            embed_dim: None,
            split: SplitMode::FullSample,
            kmeans_restarts: 10,
            kmeans_max_iters: 300,
            kmeans_tol: 1e-8,
            seed,
        }
    }

    /// Resolves the embedding dimension: an explicit choice passes through
    /// untouched, the default `k = K` is capped by what the data admits.
    pub fn resolve_embed_dim(&self, cap: usize) -> usize {
        match self.embed_dim {
            Some(k) => k,
            None => self.clusters.min(cap).max(1),
        }
    }

    pub fn kmeans_config(&self) -> KMeansConfig {
        KMeansConfig {
            clusters: self.clusters,
            restarts: self.kmeans_restarts,
            max_iters: self.kmeans_max_iters,
            tol: self.kmeans_tol,
            seed: self.seed,
        }
    }
}

/// Parsed method selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodSpec {
    KmeansRaw,
    Spectral,
    Crossfit,
    Fasc { factor_rank: usize },
}

/// Name and one-line summary of every registered method.
pub struct MethodDescriptor {
    pub name: &'static str,
    pub summary: &'static str,
}

pub const REGISTRY: &[MethodDescriptor] = &[
    MethodDescriptor {
        name: "kmeans_raw",
        summary: "K-means on the raw coordinates",
    },
    MethodDescriptor {
        name: "spectral",
        summary: "K-means in the top right singular subspace",
    },
    MethodDescriptor {
        name: "crossfit",
        summary: "spectral clustering with the basis fit on the opposite half",
    },
    MethodDescriptor {
        name: "fasc(r=R)",
        summary: "factor-adjusted spectral clustering removing R principal directions",
    },
];

impl MethodSpec {
    /// Parses a registry name: `kmeans_raw`, `spectral`, `crossfit` or
    /// `fasc(r=R)`.
    pub fn parse(s: &str) -> Result<MethodSpec> {
        let s = s.trim();
        match s {
            "kmeans_raw" => return Ok(MethodSpec::KmeansRaw),
            "spectral" => return Ok(MethodSpec::Spectral),
            "crossfit" => return Ok(MethodSpec::Crossfit),
            _ => {}
        }
        if let Some(rest) = s.strip_prefix("fasc(r=").and_then(|r| r.strip_suffix(')')) {
            let factor_rank: usize = rest.parse().map_err(|_| {
                Error::validation(format!("cannot parse factor rank in method `{s}`"))
            })?;
            return Ok(MethodSpec::Fasc { factor_rank });
        }
        Err(Error::validation(format!(
            "unknown method `{s}`; registered methods: {}",
            REGISTRY
                .iter()
                .map(|m| m.name)
                .collect::<Vec<_>>()
                .join(", ")
        )))
    }

    pub fn name(&self) -> String {
        match self {
            MethodSpec::KmeansRaw => "kmeans_raw".into(),
            MethodSpec::Spectral => "spectral".into(),
            MethodSpec::Crossfit => "crossfit".into(),
            MethodSpec::Fasc { factor_rank } => format!("fasc(r={factor_rank})"),
        }
    }

    /// Factor rank for `fasc`, none for the baselines.
    pub fn factor_rank(&self) -> Option<usize> {
        match self {
            MethodSpec::Fasc { factor_rank } => Some(*factor_rank),
            _ => None,
        }
    }

    /// Instantiates the strategy with the given shared parameters.
    pub fn build(&self, params: &MethodParams) -> Box<dyn ClusterAlgorithm> {
        match self {
            MethodSpec::KmeansRaw => Box::new(raw::RawKMeansMethod {
                params: params.clone(),
            }),
            MethodSpec::Spectral => Box::new(spectral::SpectralMethod {
                params: params.clone(),
            }),
            MethodSpec::Crossfit => Box::new(crossfit::CrossfitMethod {
                params: params.clone(),
            }),
            MethodSpec::Fasc { factor_rank } => Box::new(fasc::FascMethod {
                params: params.clone(),
                factor_rank: *factor_rank,
            }),
        }
    }
}

impl std::str::FromStr for MethodSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MethodSpec::parse(s)
    }
}

/// Maps the second pass's label alphabet onto the first pass's by
/// minimum-cost matching of the fitted centers in the ambient space.
///
/// Returns `relabel` with `relabel[second_label] = first_label`.
pub(crate) fn reconcile_alphabets(
    centers_first: &Array2<f64>,
    centers_second: &Array2<f64>,
) -> Vec<usize> {
    let k = centers_first.nrows();
    let mut cost = Array2::<f64>::zeros((k, k));
    for a in 0..k {
        for b in 0..k {
            let diff = &centers_first.row(a) - &centers_second.row(b);
            cost[[a, b]] = diff.dot(&diff).sqrt();
        }
    }
    // assignment[a] = b pairs first-center a with second-center b.
    let assignment = min_cost_assignment(&cost);
    let mut relabel = vec![0usize; k];
    for (a, &b) in assignment.iter().enumerate() {
        relabel[b] = a;
    }
    relabel
}

#[cfg(test)]
mod tests;
