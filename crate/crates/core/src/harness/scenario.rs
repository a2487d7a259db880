//! Scenario documents: flat TOML files describing either a synthetic
//! simulation sweep or a real-data run, distinguished by a `kind` key.
//! Unknown keys are hard errors, so config drift fails loudly.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::clustering::{MethodSpec, SplitMode};
use crate::dataset::CleaningRule;
use crate::error::{Error, Result};

/// How the loading matrix is drawn, which also fixes what the grid means.
///
/// `strong` and `weak` sweep the noise level σ over the grid; `fig1`
/// sweeps the factor strength `t` (covariance `tBBᵀ + I`, σ = 1) with
/// fixed centroids `±(10, 0, …, 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LoadingKind {
    Strong,
    Weak,
    Fig1,
}

/// One synthetic simulation sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub n: usize,
    pub d: usize,
    pub clusters: usize,
    /// Factor count of the generating model.
    pub factor_rank: usize,
    pub loading: LoadingKind,
    /// σ values (`strong`/`weak`) or `t` values (`fig1`).
    pub grid: Vec<f64>,
    /// Registry method names, e.g. `["spectral", "fasc(r=3)"]`.
    pub methods: Vec<String>,
    pub replicates: usize,
    pub base_seed: u64,
    pub mode: SplitMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub embed_dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kmeans_restarts: Option<usize>,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        if self.grid.is_empty() {
            return Err(Error::config(format!("scenario {}: empty grid", self.name)));
        }
        if self.grid.iter().any(|&v| !v.is_finite() || v < 0.0) {
            return Err(Error::config(format!(
                "scenario {}: grid values must be nonnegative reals",
                self.name
            )));
        }
        if self.replicates == 0 {
            return Err(Error::config(format!(
                "scenario {}: replicates must be at least 1",
                self.name
            )));
        }
        if self.methods.is_empty() {
            return Err(Error::config(format!(
                "scenario {}: no methods listed",
                self.name
            )));
        }
        for m in &self.methods {
            MethodSpec::parse(m)?;
        }
        if self.loading == LoadingKind::Fig1 && self.clusters != 2 {
            return Err(Error::config(format!(
                "scenario {}: the fig1 recipe is a two-cluster model",
                self.name
            )));
        }
        Ok(())
    }
}

/// Optional row filter applied before feature columns are finalized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ColumnFilter {
    pub column: String,
    pub equals: String,
}

/// One real-data study: ingestion protocol plus the method table to run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RealDataPlan {
    pub name: String,
    /// CSV location, resolved relative to the working directory.
    pub path: String,
    pub label_column: String,
    #[serde(default)]
    pub rules: CleaningRule,
    pub clusters: usize,
    /// Baseline methods (the factor-adjusted runs come from `r_grid`).
    pub methods: Vec<String>,
    #[serde(default)]
    pub r_grid: Vec<usize>,
    pub seed: u64,
    /// Keep only rows whose label is listed (applied after ingestion).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub keep_label_values: Option<Vec<String>>,
    /// Keep only rows where a (numeric) column equals a value, then drop
    /// that column from the features.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub keep_rows_where: Option<ColumnFilter>,
    /// Expected `(rows, feature_columns)` after cleaning; mismatches abort
    /// before any clustering runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect_shape: Option<(usize, usize)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kmeans_restarts: Option<usize>,
}

impl RealDataPlan {
    pub fn validate(&self) -> Result<()> {
        if self.clusters == 0 {
            return Err(Error::config(format!(
                "plan {}: clusters must be at least 1",
                self.name
            )));
        }
        for m in &self.methods {
            MethodSpec::parse(m)?;
        }
        Ok(())
    }
}

/// A scenario file: synthetic sweep or real-data plan.
#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioDoc {
    Synthetic(Scenario),
    RealData(RealDataPlan),
}

impl ScenarioDoc {
    pub fn name(&self) -> &str {
        match self {
            ScenarioDoc::Synthetic(s) => &s.name,
            ScenarioDoc::RealData(p) => &p.name,
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let mut table: toml::Table = text
            .parse()
            .map_err(|e| Error::config(format!("scenario file is not valid TOML: {e}")))?;
        let kind = table
            .remove("kind")
            .ok_or_else(|| Error::config("scenario file is missing the `kind` key"))?;
        let kind = kind
            .as_str()
            .ok_or_else(|| Error::config("`kind` must be a string"))?
            .to_string();
        let value = toml::Value::Table(table);
        let doc = match kind.as_str() {
            "synthetic" => ScenarioDoc::Synthetic(
                value
                    .try_into::<Scenario>()
                    .map_err(|e| Error::config(format!("bad synthetic scenario: {e}")))?,
            ),
            "realdata" => ScenarioDoc::RealData(
                value
                    .try_into::<RealDataPlan>()
                    .map_err(|e| Error::config(format!("bad realdata plan: {e}")))?,
            ),
            other => {
                return Err(Error::config(format!(
                    "unknown scenario kind `{other}` (expected `synthetic` or `realdata`)"
                )))
            }
        };
        match &doc {
            ScenarioDoc::Synthetic(s) => s.validate()?,
            ScenarioDoc::RealData(p) => p.validate()?,
        }
        Ok(doc)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        let (kind, mut table) = match self {
            ScenarioDoc::Synthetic(s) => (
                "synthetic",
                toml::Table::try_from(s)
                    .map_err(|e| Error::config(format!("cannot serialize scenario: {e}")))?,
            ),
            ScenarioDoc::RealData(p) => (
                "realdata",
                toml::Table::try_from(p)
                    .map_err(|e| Error::config(format!("cannot serialize plan: {e}")))?,
            ),
        };
        table.insert("kind".into(), toml::Value::String(kind.into()));
        toml::to_string(&table).map_err(|e| Error::config(format!("TOML serialization: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }
}
