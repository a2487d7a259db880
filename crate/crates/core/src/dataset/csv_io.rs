//! CSV ingestion with the cleaning protocol used for the real datasets:
//! drop named columns, drop rows with missing cells, optionally subtract
//! column means.
//!
//! Recognized missing-value tokens are the empty cell, `NA` and `NaN`.
//! The delimiter is auto-detected between comma and semicolon; anything
//! else must be passed explicitly.

use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use ndarray::Array2;

use crate::error::{Error, Result};

use super::Dataset;

/// Declarative cleaning steps applied during ingestion.
#[derive(Debug, Clone, Default, serde::Serialize, serde::Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct CleaningRule {
    pub drop_columns: Vec<String>,
    pub drop_rows_with_missing: bool,
    pub centralize: bool,
}

/// What ingestion did, reported as one structured line on the diagnostic
/// stream by the CLI.
#[derive(Debug, Clone)]
pub struct CleaningReport {
    pub rows_kept: usize,
    pub rows_dropped: usize,
    pub cols_dropped: usize,
    /// Distinct label strings in order of first appearance; index = 0-based id.
    pub label_values: Option<Vec<String>>,
}

impl fmt::Display for CleaningReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "cleaning rows_kept={} rows_dropped={} cols_dropped={}",
            self.rows_kept, self.rows_dropped, self.cols_dropped
        )?;
        if let Some(values) = &self.label_values {
            write!(f, " classes={}", values.len())?;
        }
        Ok(())
    }
}

fn is_missing(cell: &str) -> bool {
    matches!(cell.trim(), "" | "NA" | "NaN")
}

/// Loads a delimiter-separated file with a header row.
pub fn load_csv(
    path: &Path,
    label_column: Option<&str>,
    rules: &CleaningRule,
) -> Result<(Dataset, CleaningReport)> {
    let delimiter = detect_delimiter(path)?;
    load_csv_with_delimiter(path, label_column, rules, delimiter)
}

/// As [`load_csv`] but with an explicit delimiter byte.
pub fn load_csv_with_delimiter(
    path: &Path,
    label_column: Option<&str>,
    rules: &CleaningRule,
    delimiter: u8,
) -> Result<(Dataset, CleaningReport)> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)?;

    let headers: Vec<String> = reader.headers()?.iter().map(|h| h.to_string()).collect();
    for name in &rules.drop_columns {
        if !headers.iter().any(|h| h == name) {
            return Err(Error::validation(format!(
                "drop column `{name}` does not exist in the header"
            )));
        }
    }
    let label_idx = match label_column {
        Some(name) => Some(
            headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::validation(format!("label column `{name}` not found")))?,
        ),
        None => None,
    };

    let feature_idx: Vec<usize> = (0..headers.len())
        .filter(|&i| Some(i) != label_idx && !rules.drop_columns.iter().any(|c| *c == headers[i]))
        .collect();
    if feature_idx.is_empty() {
        return Err(Error::validation(
            "no feature columns remain after cleaning",
        ));
    }
    let feature_names: Vec<String> = feature_idx.iter().map(|&i| headers[i].clone()).collect();

    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut label_ids: Vec<usize> = Vec::new();
    let mut label_values: Vec<String> = Vec::new();
    let mut rows_dropped = 0usize;

    for (data_row, record) in reader.records().enumerate() {
        let record = record?;
        let row_no = data_row + 1;

        let cell = |i: usize| record.get(i).unwrap_or("");
        let mut missing = feature_idx.iter().any(|&i| is_missing(cell(i)));
        if let Some(li) = label_idx {
            missing = missing || is_missing(cell(li));
        }
        if missing {
            if rules.drop_rows_with_missing {
                rows_dropped += 1;
                continue;
            }
            let column = feature_idx
                .iter()
                .copied()
                .chain(label_idx)
                .find(|&i| is_missing(cell(i)))
                .map(|i| headers[i].clone())
                .unwrap_or_default();
            return Err(Error::Parse {
                row: row_no,
                column,
                msg: "missing value (enable drop_rows_with_missing to skip)".into(),
            });
        }

        let mut parsed = Vec::with_capacity(feature_idx.len());
        for &i in &feature_idx {
            let raw = cell(i);
            let value: f64 = raw.parse().map_err(|_| Error::Parse {
                row: row_no,
                column: headers[i].clone(),
                msg: format!("non-numeric cell `{raw}`"),
            })?;
            parsed.push(value);
        }
        rows.push(parsed);

        if let Some(li) = label_idx {
            let raw = cell(li).to_string();
            let id = match label_values.iter().position(|v| *v == raw) {
                Some(id) => id,
                None => {
                    label_values.push(raw);
                    label_values.len() - 1
                }
            };
            label_ids.push(id);
        }
    }

    if rows.is_empty() {
        return Err(Error::validation("no data rows survived cleaning"));
    }
    let n = rows.len();
    let d = feature_idx.len();
    let mut x = Array2::<f64>::zeros((n, d));
    for (i, row) in rows.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            x[[i, j]] = v;
        }
    }

    let labels = label_idx.map(|_| label_ids);
    let mut data = Dataset::new(x, labels, Some(feature_names))?;
    if rules.centralize {
        data = data.centered();
    }

    let report = CleaningReport {
        rows_kept: n,
        rows_dropped,
        cols_dropped: rules.drop_columns.len(),
        label_values: label_idx.map(|_| label_values),
    };
    Ok((data, report))
}

/// Writes a dataset as comma-separated values with a header row. Labels,
/// when present, go to a trailing `label` column as 1-based ids. Floats
/// print in shortest round-trip form, so reading the file back recovers
/// the exact values.
pub fn write_csv(data: &Dataset, path: &Path) -> Result<()> {
    use std::io::Write;
    let mut out = std::io::BufWriter::new(File::create(path)?);
    let names: Vec<String> = match data.feature_names() {
        Some(names) => names.to_vec(),
        None => (1..=data.dim()).map(|j| format!("f{j}")).collect(),
    };
    write!(out, "{}", names.join(","))?;
    if data.labels().is_some() {
        write!(out, ",label")?;
    }
    writeln!(out)?;
    for (i, row) in data.matrix().rows().into_iter().enumerate() {
        let mut first = true;
        for v in row.iter() {
            if !first {
                write!(out, ",")?;
            }
            write!(out, "{v}")?;
            first = false;
        }
        if let Some(labels) = data.labels() {
            write!(out, ",{}", labels[i] + 1)?;
        }
        writeln!(out)?;
    }
    Ok(())
}

/// Counts commas and semicolons on the header line; ties or absence of
/// both require an explicit delimiter.
fn detect_delimiter(path: &Path) -> Result<u8> {
    let file = File::open(path)?;
    let mut first_line = String::new();
    BufReader::new(file).read_line(&mut first_line)?;
    let commas = first_line.matches(',').count();
    let semis = first_line.matches(';').count();
    if commas == 0 && semis == 0 {
        return Err(Error::validation(
            "could not detect a comma or semicolon delimiter; pass one explicitly",
        ));
    }
    if commas == semis {
        return Err(Error::validation(
            "ambiguous delimiter (equal comma and semicolon counts); pass one explicitly",
        ));
    }
    Ok(if commas > semis { b',' } else { b';' })
}
