//! TOML serialization for mixture specs, used by the `generate` and
//! `diagnose` commands. Matrices are written row-major as arrays of rows.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::FactorMixtureSpec;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecFile {
    sigma: f64,
    weights: Vec<f64>,
    #[serde(default)]
    centered: bool,
    /// `K` rows of `d` entries.
    centroids: Vec<Vec<f64>>,
    /// `d` rows of `r` entries; empty rows mean no factor component.
    #[serde(default)]
    loading: Vec<Vec<f64>>,
}

fn rows_to_matrix(rows: &[Vec<f64>], what: &str) -> Result<Array2<f64>> {
    let nrows = rows.len();
    let ncols = rows.first().map(|r| r.len()).unwrap_or(0);
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::config(format!("{what}: ragged rows")));
    }
    let mut m = Array2::<f64>::zeros((nrows, ncols));
    for (i, row) in rows.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            m[[i, j]] = v;
        }
    }
    Ok(m)
}

impl FactorMixtureSpec {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let file: SpecFile =
            toml::from_str(text).map_err(|e| Error::config(format!("bad model spec file: {e}")))?;
        let centroids = rows_to_matrix(&file.centroids, "centroids")?;
        let d = centroids.ncols();
        let loading = if file.loading.is_empty() {
            Array2::<f64>::zeros((d, 0))
        } else {
            rows_to_matrix(&file.loading, "loading")?
        };
        FactorMixtureSpec::new(centroids, loading, file.sigma, file.weights, file.centered)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        let file = SpecFile {
            sigma: self.sigma(),
            weights: self.weights().to_vec(),
            centered: self.is_centered(),
            centroids: self
                .centroids()
                .rows()
                .into_iter()
                .map(|r| r.to_vec())
                .collect(),
            loading: self
                .loading()
                .rows()
                .into_iter()
                .map(|r| r.to_vec())
                .collect(),
        };
        toml::to_string(&file).map_err(|e| Error::config(format!("spec serialization: {e}")))
    }

    pub fn load_toml(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }
}
