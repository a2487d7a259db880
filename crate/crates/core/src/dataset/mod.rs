//! Data model: the observation matrix with optional ground-truth labels,
//! the synthetic factor-mixture generator and CSV ingestion.
//!
//! Labels are 0-based everywhere inside the crate; external formats use
//! 1-based ids and the conversion happens only at the I/O boundary.

mod csv_io;
mod generate;
mod spec_io;

pub use csv_io::{load_csv, load_csv_with_delimiter, write_csv, CleaningReport, CleaningRule};
pub use generate::{
    generate, generate_scenario, FactorMixtureSpec, GaussStream, ScenarioKind,
};

use ndarray::Array2;

use crate::error::{Error, Result};

/// An `n×d` observation matrix with optional labels and feature names.
///
/// Immutable after construction; cheap to share across worker threads.
#[derive(Debug, Clone)]
pub struct Dataset {
    x: Array2<f64>,
    labels: Option<Vec<usize>>,
    feature_names: Option<Vec<String>>,
}

impl Dataset {
    /// Builds a dataset, validating shapes and finiteness.
    pub fn new(
        x: Array2<f64>,
        labels: Option<Vec<usize>>,
        feature_names: Option<Vec<String>>,
    ) -> Result<Self> {
        if x.nrows() == 0 || x.ncols() == 0 {
            return Err(Error::validation(format!(
                "dataset must be non-empty, got {}x{}",
                x.nrows(),
                x.ncols()
            )));
        }
        if let Some(bad) = x.iter().position(|v| !v.is_finite()) {
            let (row, col) = (bad / x.ncols(), bad % x.ncols());
            return Err(Error::validation(format!(
                "non-finite value at row {row}, column {col}"
            )));
        }
        if let Some(labels) = &labels {
            if labels.len() != x.nrows() {
                return Err(Error::validation(format!(
                    "label count {} does not match row count {}",
                    labels.len(),
                    x.nrows()
                )));
            }
        }
        if let Some(names) = &feature_names {
            if names.len() != x.ncols() {
                return Err(Error::validation(format!(
                    "feature name count {} does not match column count {}",
                    names.len(),
                    x.ncols()
                )));
            }
        }
        Ok(Dataset {
            x,
            labels,
            feature_names,
        })
    }

    pub fn matrix(&self) -> &Array2<f64> {
        &self.x
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn dim(&self) -> usize {
        self.x.ncols()
    }

    /// 0-based labels, if present.
    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }

    pub fn feature_names(&self) -> Option<&[String]> {
        self.feature_names.as_deref()
    }

    /// Same labels, new feature matrix (used by projections; the column
    /// count may change, so feature names are dropped unless they still fit).
    pub fn with_matrix(&self, x: Array2<f64>) -> Dataset {
        let feature_names = if x.ncols() == self.x.ncols() {
            self.feature_names.clone()
        } else {
            None
        };
        Dataset {
            x,
            labels: self.labels.clone(),
            feature_names,
        }
    }

    /// Splits into rows `0..⌊n/2⌋` and the rest; labels split consistently.
    /// With odd `n` the first half gets the smaller share.
    pub fn split_halves(&self) -> Result<(Dataset, Dataset)> {
        let n = self.n();
        if n < 2 {
            return Err(Error::validation(format!(
                "cannot split a dataset with {n} row(s)"
            )));
        }
        let mid = n / 2;
        Ok((self.take_rows(0, mid), self.take_rows(mid, n)))
    }

    fn take_rows(&self, start: usize, end: usize) -> Dataset {
        let x = self.x.slice(ndarray::s![start..end, ..]).to_owned();
        let labels = self.labels.as_ref().map(|l| l[start..end].to_vec());
        Dataset {
            x,
            labels,
            feature_names: self.feature_names.clone(),
        }
    }

    /// Vertical concatenation; the inverse of `split_halves`.
    pub fn concat(first: &Dataset, second: &Dataset) -> Result<Dataset> {
        if first.dim() != second.dim() {
            return Err(Error::validation("concat: column counts differ"));
        }
        let mut x = Array2::<f64>::zeros((first.n() + second.n(), first.dim()));
        x.slice_mut(ndarray::s![..first.n(), ..])
            .assign(first.matrix());
        x.slice_mut(ndarray::s![first.n().., ..])
            .assign(second.matrix());
        let labels = match (&first.labels, &second.labels) {
            (Some(a), Some(b)) => {
                let mut l = a.clone();
                l.extend_from_slice(b);
                Some(l)
            }
            _ => None,
        };
        Dataset::new(x, labels, first.feature_names.clone())
    }

    /// Subtracts the column means in place semantics (returns a new dataset).
    pub fn centered(&self) -> Dataset {
        let n = self.n() as f64;
        let means = self.x.sum_axis(ndarray::Axis(0)) / n;
        let mut x = self.x.clone();
        for mut row in x.rows_mut() {
            row -= &means;
        }
        Dataset {
            x,
            labels: self.labels.clone(),
            feature_names: self.feature_names.clone(),
        }
    }
}
