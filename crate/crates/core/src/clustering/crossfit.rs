//! Cross-fitted spectral clustering: the embedding basis for each half is
//! estimated on the opposite half, which decouples the projection from the
//! rows it embeds. The two halves' label alphabets are reconciled by
//! matching fitted centers back-projected into the ambient space.

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::kmeans::{kmeans, KMeansConfig};
use crate::numerics::top_right_singular;

use super::{reconcile_alphabets, ClusterAlgorithm, ClusteringResult, MethodParams, MethodTag};

pub fn spectral_cluster_crossfit(
    data: &Dataset,
    clusters: usize,
    embed_dim: usize,
    kmeans_cfg: &KMeansConfig,
) -> Result<ClusteringResult> {
    if data.n() < 2 * clusters {
        return Err(Error::validation(format!(
            "cross-fitting needs at least 2K = {} rows, got {}",
            2 * clusters,
            data.n()
        )));
    }
    if embed_dim == 0 || embed_dim > clusters.min(data.dim()) {
        return Err(Error::validation(format!(
            "embedding dimension {embed_dim} must lie in 1..=min(K={clusters}, d={})",
            data.dim()
        )));
    }
    let (first, second) = data.split_halves()?;
    let mut cfg = kmeans_cfg.clone();
    cfg.clusters = clusters;

    // Basis from the second half labels the first half, and vice versa.
    let basis_from_second = top_right_singular(second.matrix(), embed_dim)?;
    let embed_first = first.matrix().dot(basis_from_second.vectors());
    let km_first = kmeans(&embed_first, &cfg)?;

    let basis_from_first = top_right_singular(first.matrix(), embed_dim)?;
    let embed_second = second.matrix().dot(basis_from_first.vectors());
    let km_second = kmeans(&embed_second, &cfg)?;

    // Back-project both centers into ℝ^d and match.
    let centers_first_d = km_first.centers.dot(&basis_from_second.vectors().t());
    let centers_second_d = km_second.centers.dot(&basis_from_first.vectors().t());
    let relabel = reconcile_alphabets(&centers_first_d, &centers_second_d);

    let mut labels = km_first.labels;
    labels.extend(km_second.labels.iter().map(|&l| relabel[l]));

    Ok(ClusteringResult {
        labels,
        embedded_centers: km_first.centers,
        method: MethodTag::SpectralCrossfit,
        basis: Some(basis_from_second),
        factor_basis: None,
        objective: km_first.objective + km_second.objective,
    })
}

pub struct CrossfitMethod {
    pub params: MethodParams,
}

impl ClusterAlgorithm for CrossfitMethod {
    fn name(&self) -> String {
        "crossfit".into()
    }

    fn cluster(&self, data: &Dataset) -> Result<ClusteringResult> {
        spectral_cluster_crossfit(
            data,
            self.params.clusters,
            self.params.resolve_embed_dim(data.dim()),
            &self.params.kmeans_config(),
        )
    }
}
