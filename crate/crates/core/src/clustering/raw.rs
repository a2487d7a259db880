//! K-means on the raw coordinates, the non-spectral baseline.

use crate::dataset::Dataset;
use crate::error::Result;
use crate::kmeans::{kmeans, KMeansConfig};

use super::{ClusterAlgorithm, ClusteringResult, MethodParams, MethodTag};

pub fn kmeans_raw(
    data: &Dataset,
    clusters: usize,
    kmeans_cfg: &KMeansConfig,
) -> Result<ClusteringResult> {
    let mut cfg = kmeans_cfg.clone();
    cfg.clusters = clusters;
    let km = kmeans(data.matrix(), &cfg)?;
    Ok(ClusteringResult {
        labels: km.labels,
        embedded_centers: km.centers,
        method: MethodTag::KmeansRaw,
        basis: None,
        factor_basis: None,
        objective: km.objective,
    })
}

pub struct RawKMeansMethod {
    pub params: MethodParams,
}

impl ClusterAlgorithm for RawKMeansMethod {
    fn name(&self) -> String {
        "kmeans_raw".into()
    }

    fn cluster(&self, data: &Dataset) -> Result<ClusteringResult> {
        kmeans_raw(data, self.params.clusters, &self.params.kmeans_config())
    }
}
