//! Signal-to-noise quantities of a mixture spec and the oracle classifier
//! for the symmetric two-cluster case.

use ndarray::{Array1, Array2};

use crate::dataset::{Dataset, FactorMixtureSpec};
use crate::error::{Error, Result};
use crate::numerics::{solve_spd, top_eigen};

use super::normal::phi;

/// The three signal-to-noise ratios the theory compares, plus the optimal
/// misclassification rate where it is defined.
///
/// * `snr` — `μᵀΣ⁻¹μ` for a symmetric two-cluster spec (`μ₂ = −μ₁`),
///   `None` otherwise or when `σ = 0` makes the covariance singular.
/// * `s_quantity` — `min gap² / ‖BBᵀ + σ²I‖`; the exponent plain spectral
///   clustering achieves.
/// * `snr_bar` — `min gap² / σ²`; the exponent after factor adjustment.
///   Reported as `+∞` when `σ = 0`.
/// * `optimal_rate` — `Φ(−√snr)` when `snr` is defined.
#[derive(Debug, Clone)]
pub struct SnrReport {
    pub snr: Option<f64>,
    pub s_quantity: f64,
    pub snr_bar: f64,
    pub optimal_rate: Option<f64>,
}

/// Smallest squared centroid gap; `+∞` for a single cluster.
fn min_gap_squared(spec: &FactorMixtureSpec) -> f64 {
    let c = spec.centroids();
    let k = c.nrows();
    let mut best = f64::INFINITY;
    for i in 0..k {
        for j in (i + 1)..k {
            let gap = (&c.row(i) - &c.row(j)).mapv(|v| v * v).sum();
            best = best.min(gap);
        }
    }
    best
}

/// Largest eigenvalue of `BBᵀ`, computed from the small `BᵀB` Gram.
fn loading_norm_squared(spec: &FactorMixtureSpec) -> Result<f64> {
    let b = spec.loading();
    if b.ncols() == 0 {
        return Ok(0.0);
    }
    let gram = b.t().dot(b);
    let basis = top_eigen(&gram, 1)?;
    Ok(basis.values()[0].max(0.0))
}

fn symmetric_two_cluster(spec: &FactorMixtureSpec) -> Option<Array1<f64>> {
    if spec.clusters() != 2 {
        return None;
    }
    let mu = spec.centroids().row(0).to_owned();
    let sum = &mu + &spec.centroids().row(1);
    let norm = sum.dot(&sum).sqrt();
    if norm <= 1e-10 * (1.0 + mu.dot(&mu).sqrt()) {
        Some(mu)
    } else {
        None
    }
}

/// Model covariance `BBᵀ + σ²I` as a dense matrix.
fn model_covariance(spec: &FactorMixtureSpec) -> Array2<f64> {
    let d = spec.dim();
    let b = spec.loading();
    let mut sigma = Array2::<f64>::zeros((d, d));
    if b.ncols() > 0 {
        sigma = b.dot(&b.t());
    }
    let s2 = spec.sigma() * spec.sigma();
    for i in 0..d {
        sigma[[i, i]] += s2;
    }
    sigma
}

/// Computes the report. `snr` goes through a linear solve of the model
/// covariance (never an explicit inverse) and the solve residual is
/// checked against `1e-8·‖μ‖`.
pub fn snr_report(spec: &FactorMixtureSpec) -> Result<SnrReport> {
    let gap2 = min_gap_squared(spec);
    let sigma2 = spec.sigma() * spec.sigma();
    let op_norm = loading_norm_squared(spec)? + sigma2;
    let s_quantity = if op_norm > 0.0 {
        gap2 / op_norm
    } else {
        f64::INFINITY
    };
    let snr_bar = if sigma2 > 0.0 {
        gap2 / sigma2
    } else {
        f64::INFINITY
    };

    let snr = match symmetric_two_cluster(spec) {
        Some(mu) if spec.sigma() > 0.0 => {
            let sigma = model_covariance(spec);
            let z = solve_spd(&sigma, &mu)?;
            let residual = (&sigma.dot(&z) - &mu).mapv(|v| v * v).sum().sqrt();
            let mu_norm = mu.dot(&mu).sqrt();
            if residual > 1e-8 * mu_norm.max(f64::MIN_POSITIVE) {
                return Err(Error::Numerical {
                    msg: "covariance solve residual exceeds tolerance".into(),
                    residual,
                });
            }
            Some(mu.dot(&z))
        }
        _ => None,
    };
    let optimal_rate = snr.map(|s| phi(-s.max(0.0).sqrt()));

    Ok(SnrReport {
        snr,
        s_quantity,
        snr_bar,
        optimal_rate,
    })
}

/// Oracle labels for the symmetric two-cluster model: label 0 iff
/// `⟨xᵢ, Σ⁻¹μ⟩ ≥ 0`. Used as the reference curve, never as a clustering
/// method.
pub fn optimal_bayes_labels(data: &Dataset, spec: &FactorMixtureSpec) -> Result<Vec<usize>> {
    let mu = symmetric_two_cluster(spec).ok_or_else(|| {
        Error::validation("the oracle classifier needs a symmetric two-cluster spec")
    })?;
    if spec.sigma() <= 0.0 {
        return Err(Error::validation(
            "the oracle classifier needs σ > 0 for an invertible covariance",
        ));
    }
    if data.dim() != spec.dim() {
        return Err(Error::validation("data dimension does not match the spec"));
    }
    let sigma = model_covariance(spec);
    let w = solve_spd(&sigma, &mu)?;
    Ok(data
        .matrix()
        .rows()
        .into_iter()
        .map(|row| if row.dot(&w) >= 0.0 { 0 } else { 1 })
        .collect())
}
