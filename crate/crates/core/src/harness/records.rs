//! Experiment records and their CSV serializations.
//!
//! Output is deterministic: floats print in shortest round-trip form and
//! row order follows the (grid, replicate, method) iteration order, so a
//! repeated run with the same config is byte-identical.

use std::io::Write;
use std::path::Path;

use crate::error::Result;

/// One (scenario, grid value, replicate, method) row.
#[derive(Debug, Clone)]
pub struct ExperimentRecord {
    pub scenario: String,
    pub method: String,
    /// Factor rank used by the algorithm; `None` for non-adjusted methods.
    pub r_alg: Option<usize>,
    /// Grid value: σ for the factor scenarios, `t` for the fig1 toy.
    pub sigma: f64,
    pub replicate: usize,
    pub seed: u64,
    /// `NaN` marks a failed replicate (the sweep never aborts).
    pub mislabeling: f64,
    pub objective: f64,
    /// Zero unless timing was explicitly enabled; wall-clock values break
    /// byte-identical reruns and are opt-in.
    pub wall_ms: f64,
    pub snr_bar: f64,
    pub s_quantity: f64,
}

pub const CSV_HEADER: &str =
    "scenario,method,r_alg,sigma,replicate,seed,mislabeling,objective,wall_ms,snr_bar,s_quantity";

fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{v}")
    }
}

pub fn emit_csv(records: &[ExperimentRecord], path: &Path) -> Result<()> {
    let mut out = std::fs::File::create(path)?;
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.scenario,
            r.method,
            r.r_alg.map(|v| v.to_string()).unwrap_or_default(),
            fmt_f64(r.sigma),
            r.replicate,
            r.seed,
            fmt_f64(r.mislabeling),
            fmt_f64(r.objective),
            fmt_f64(r.wall_ms),
            fmt_f64(r.snr_bar),
            fmt_f64(r.s_quantity),
        )?;
    }
    Ok(())
}

/// Per-(method, sigma) aggregates with means and standard errors.
/// Failed replicates (`NaN` mislabeling) are excluded from the aggregates;
/// `count` reports how many records contributed.
pub fn emit_plotdata(records: &[ExperimentRecord], path: &Path) -> Result<()> {
    let mut out = std::fs::File::create(path)?;
    writeln!(
        out,
        "method,sigma,count,mislabeling_mean,mislabeling_se,objective_mean,objective_se"
    )?;
    // Group keys in first-appearance order for stable output.
    let mut keys: Vec<(String, f64)> = Vec::new();
    for r in records {
        if !keys
            .iter()
            .any(|(m, s)| *m == r.method && s.to_bits() == r.sigma.to_bits())
        {
            keys.push((r.method.clone(), r.sigma));
        }
    }
    for (method, sigma) in keys {
        let group: Vec<&ExperimentRecord> = records
            .iter()
            .filter(|r| {
                r.method == method
                    && r.sigma.to_bits() == sigma.to_bits()
                    && !r.mislabeling.is_nan()
            })
            .collect();
        let count = group.len();
        let (m_mean, m_se) = mean_se(group.iter().map(|r| r.mislabeling));
        let (o_mean, o_se) = mean_se(group.iter().map(|r| r.objective));
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            method,
            fmt_f64(sigma),
            count,
            fmt_f64(m_mean),
            fmt_f64(m_se),
            fmt_f64(o_mean),
            fmt_f64(o_se),
        )?;
    }
    Ok(())
}

fn mean_se(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let values: Vec<f64> = values.collect();
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}
