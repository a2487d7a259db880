//! The real-data protocol: ingest, optionally filter rows, verify the
//! cleaned shape against the expected one, then run the method table and
//! a random-guess baseline against the ground-truth labels.

use std::path::Path;

use crate::analysis::{mislabeling, scree};
use crate::clustering::{MethodParams, MethodSpec, SplitMode};
use crate::dataset::{load_csv, CleaningReport, Dataset, GaussStream};
use crate::error::{Error, Result};
use crate::seeds;

use super::scenario::RealDataPlan;

/// One row of the method table.
#[derive(Debug, Clone)]
pub struct RealDataRecord {
    pub method: String,
    pub r_alg: Option<usize>,
    pub mislabeling: f64,
    pub seed: u64,
}

#[derive(Debug)]
pub struct RealDataOutcome {
    pub records: Vec<RealDataRecord>,
    /// Eigenvalues of the centered covariance, descending.
    pub scree: Vec<f64>,
    pub report: CleaningReport,
    pub rows: usize,
    pub features: usize,
    pub classes: usize,
}

/// Runs a real-data plan against the CSV at `path` (usually
/// `plan.path`, overridable for relocated files).
pub fn run_realdata(plan: &RealDataPlan, path: &Path) -> Result<RealDataOutcome> {
    plan.validate()?;
    let (mut data, mut report) = load_csv(path, Some(&plan.label_column), &plan.rules)?;

    if let Some(filter) = &plan.keep_rows_where {
        data = filter_rows_by_column(&data, &filter.column, &filter.equals)?;
    }
    if let Some(keep) = &plan.keep_label_values {
        let values = report
            .label_values
            .as_ref()
            .ok_or_else(|| Error::validation("label filtering needs a label column"))?;
        let keep_ids: Vec<usize> = values
            .iter()
            .enumerate()
            .filter(|(_, v)| keep.contains(v))
            .map(|(i, _)| i)
            .collect();
        for wanted in keep {
            if !values.contains(wanted) {
                return Err(Error::validation(format!(
                    "label value `{wanted}` never appears in the data"
                )));
            }
        }
        let (filtered, kept_values) = retain_labels(&data, &keep_ids, values)?;
        data = filtered;
        report.label_values = Some(kept_values);
    }
    report.rows_kept = data.n();

    let classes = report
        .label_values
        .as_ref()
        .map(|v| v.len())
        .unwrap_or(plan.clusters);
    if classes > plan.clusters {
        return Err(Error::validation(format!(
            "data has {classes} classes but the plan declares K = {}",
            plan.clusters
        )));
    }
    if let Some((rows, cols)) = plan.expect_shape {
        if data.n() != rows || data.dim() != cols {
            return Err(Error::validation(format!(
                "cleaned shape {}x{} does not match the expected {rows}x{cols}",
                data.n(),
                data.dim()
            )));
        }
    }

    let truth = data
        .labels()
        .ok_or_else(|| Error::validation("real-data runs need ground-truth labels"))?
        .to_vec();

    let mut records = Vec::new();
    let mut run_method = |spec: MethodSpec, seed_tag: &str| -> Result<()> {
        let seed = seeds::mix(plan.seed, seed_tag);
        let mut params = MethodParams::new(plan.clusters, seed);
        params.split = SplitMode::FullSample;
        if let Some(restarts) = plan.kmeans_restarts {
            params.kmeans_restarts = restarts;
        }
        let algorithm = spec.build(&params);
        let result = algorithm.cluster(&data)?;
        let rate = mislabeling(&result.labels, &truth, plan.clusters)?;
        records.push(RealDataRecord {
            method: spec.name(),
            r_alg: spec.factor_rank(),
            mislabeling: rate,
            seed,
        });
        Ok(())
    };

    for name in &plan.methods {
        let spec = MethodSpec::parse(name)?;
        run_method(spec, &format!("method:{name}"))?;
    }
    for &r in &plan.r_grid {
        run_method(MethodSpec::Fasc { factor_rank: r }, &format!("fasc:{r}"))?;
    }

    // Random-guess baseline: uniform labels from the same seed family.
    let baseline_seed = seeds::mix(plan.seed, "baseline");
    let mut stream = GaussStream::new(baseline_seed);
    let random_labels: Vec<usize> = (0..data.n())
        .map(|_| (stream.next_uniform() * plan.clusters as f64) as usize % plan.clusters)
        .collect();
    records.push(RealDataRecord {
        method: "baseline_random".into(),
        r_alg: None,
        mislabeling: mislabeling(&random_labels, &truth, plan.clusters)?,
        seed: baseline_seed,
    });

    let scree = scree(&data)?;
    Ok(RealDataOutcome {
        rows: data.n(),
        features: data.dim(),
        classes,
        records,
        scree,
        report,
    })
}

/// Keeps rows whose (numeric) `column` equals `value`, then drops that
/// column from the features.
fn filter_rows_by_column(data: &Dataset, column: &str, value: &str) -> Result<Dataset> {
    let names = data
        .feature_names()
        .ok_or_else(|| Error::validation("row filtering needs feature names"))?;
    let idx = names
        .iter()
        .position(|n| n == column)
        .ok_or_else(|| Error::validation(format!("filter column `{column}` not found")))?;
    let target: f64 = value
        .parse()
        .map_err(|_| Error::validation(format!("filter value `{value}` is not numeric")))?;

    let keep: Vec<usize> = (0..data.n())
        .filter(|&i| data.matrix()[[i, idx]] == target)
        .collect();
    if keep.is_empty() {
        return Err(Error::validation(format!(
            "no rows have {column} = {value}"
        )));
    }
    let d_new = data.dim() - 1;
    let mut x = ndarray::Array2::<f64>::zeros((keep.len(), d_new));
    for (new_i, &old_i) in keep.iter().enumerate() {
        let mut new_j = 0;
        for j in 0..data.dim() {
            if j != idx {
                x[[new_i, new_j]] = data.matrix()[[old_i, j]];
                new_j += 1;
            }
        }
    }
    let labels = data
        .labels()
        .map(|l| keep.iter().map(|&i| l[i]).collect::<Vec<_>>());
    let new_names: Vec<String> = names
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != idx)
        .map(|(_, n)| n.clone())
        .collect();
    Dataset::new(x, labels, Some(new_names))
}

/// Keeps rows whose label id is listed and remaps ids to `0..kept`.
fn retain_labels(
    data: &Dataset,
    keep_ids: &[usize],
    values: &[String],
) -> Result<(Dataset, Vec<String>)> {
    let labels = data
        .labels()
        .ok_or_else(|| Error::validation("label filtering needs labels"))?;
    let mut remap = vec![usize::MAX; values.len()];
    for (new_id, &old_id) in keep_ids.iter().enumerate() {
        remap[old_id] = new_id;
    }
    let keep_rows: Vec<usize> = (0..data.n())
        .filter(|&i| remap[labels[i]] != usize::MAX)
        .collect();
    if keep_rows.is_empty() {
        return Err(Error::validation("label filter removed every row"));
    }
    let mut x = ndarray::Array2::<f64>::zeros((keep_rows.len(), data.dim()));
    let mut new_labels = Vec::with_capacity(keep_rows.len());
    for (new_i, &old_i) in keep_rows.iter().enumerate() {
        x.row_mut(new_i).assign(&data.matrix().row(old_i));
        new_labels.push(remap[labels[old_i]]);
    }
    let kept_values: Vec<String> = keep_ids.iter().map(|&i| values[i].clone()).collect();
    let dataset = Dataset::new(
        x,
        Some(new_labels),
        data.feature_names().map(|n| n.to_vec()),
    )?;
    Ok((dataset, kept_values))
}
