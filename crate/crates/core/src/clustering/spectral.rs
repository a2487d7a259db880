//! Plain spectral clustering: rows are embedded onto the top-`k` right
//! singular subspace of the data matrix and K-means runs on the embedding.

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::kmeans::{kmeans, KMeansConfig};
use crate::numerics::top_right_singular;

use super::{ClusterAlgorithm, ClusteringResult, MethodParams, MethodTag};

/// Embeds `x` as `xᵀV̂` and K-means-clusters the embedding.
///
/// `clusters` overrides the cluster count in `kmeans_cfg`.
pub fn spectral_cluster(
    data: &Dataset,
    clusters: usize,
    embed_dim: usize,
    kmeans_cfg: &KMeansConfig,
) -> Result<ClusteringResult> {
    if embed_dim == 0 || embed_dim > clusters.min(data.dim()) {
        return Err(Error::validation(format!(
            "embedding dimension {embed_dim} must lie in 1..=min(K={clusters}, d={})",
            data.dim()
        )));
    }
    if data.n() < clusters {
        return Err(Error::validation(format!(
            "{} rows cannot form {clusters} clusters",
            data.n()
        )));
    }
    let basis = top_right_singular(data.matrix(), embed_dim)?;
    let embedding = data.matrix().dot(basis.vectors());
    let mut cfg = kmeans_cfg.clone();
    cfg.clusters = clusters;
    let km = kmeans(&embedding, &cfg)?;
    Ok(ClusteringResult {
        labels: km.labels,
        embedded_centers: km.centers,
        method: MethodTag::Spectral,
        basis: Some(basis),
        factor_basis: None,
        objective: km.objective,
    })
}

pub struct SpectralMethod {
    pub params: MethodParams,
}

impl ClusterAlgorithm for SpectralMethod {
    fn name(&self) -> String {
        "spectral".into()
    }

    fn cluster(&self, data: &Dataset) -> Result<ClusteringResult> {
        spectral_cluster(
            data,
            self.params.clusters,
            self.params.resolve_embed_dim(data.dim()),
            &self.params.kmeans_config(),
        )
    }
}
