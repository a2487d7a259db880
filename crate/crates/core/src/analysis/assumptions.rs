//! Computable diagnostics for the modeling assumptions: loading spectrum,
//! pervasiveness ratios, factor/centroid perpendicularity, the eigen-gap
//! the projection step relies on, and the `β`, `ψ`, `ρ` quantities of the
//! spectral-step guarantee.
//!
//! Everything is evaluated analytically from the generative spec; nothing
//! here estimates from data.

use ndarray::Array2;

use crate::dataset::{Dataset, FactorMixtureSpec};
use crate::error::{Error, Result};
use crate::numerics::{sample_covariance, symmetric_eigen, top_eigen, top_right_singular};

/// Thresholds used by the boolean checks.
#[derive(Debug, Clone)]
pub struct AssumptionOptions {
    /// Sample size the `1/√log n` alternative refers to.
    pub n: usize,
    /// Constant cap in the perpendicularity check.
    pub perp_constant: f64,
}

impl AssumptionOptions {
    pub fn new(n: usize) -> Self {
        AssumptionOptions {
            n,
            perp_constant: 0.2,
        }
    }
}

#[derive(Debug, Clone)]
pub struct AssumptionReport {
    pub sigma_min_b: f64,
    pub sigma_max_b: f64,
    /// `‖UᵀM‖` between the loading and centroid eigenspaces.
    pub u_top_m_norm: f64,
    /// `σ²min(B)/d` and `σ²max(B)/d`.
    pub pervasiveness_ratio_lo: f64,
    pub pervasiveness_ratio_hi: f64,
    pub weak_factor_ok: bool,
    /// Lower bound `3(‖E[μμᵀ]‖ + σ²)` that `σ²min(B)` is checked against.
    pub weak_factor_threshold: f64,
    pub perpendicularity_ok: bool,
    /// Bound `min(√d·(σ ∨ 1/√log n), c)` that `‖UᵀM‖` is checked against.
    pub perpendicularity_threshold: f64,
    /// `λ_r(Σ) − λ_{r+1}(Σ)` of the model covariance.
    pub eigen_gap: f64,
    /// Set when `r = 0`: loading-derived fields are reported as zero.
    pub degenerate_loading: bool,
    /// Set when `E[μμᵀ] = 0` (single centroid at the origin).
    pub mean_rank_zero: bool,
}

/// Weighted centroid second moment written as `SᵀS` with
/// `S = diag(√p)·(centroid rows)`, so its spectrum comes from a `K×K` Gram.
fn weighted_centroid_factor(spec: &FactorMixtureSpec) -> Array2<f64> {
    let mut s = spec.centroids().clone();
    for (j, mut row) in s.rows_mut().into_iter().enumerate() {
        let w = spec.weights()[j].sqrt();
        row.mapv_inplace(|v| v * w);
    }
    s
}

/// Analytic spectrum of `Σ = BBᵀ + E[μμᵀ] + σ²I` via the stacked factor
/// `[B | Sᵀ]`, whose column Gram is `(r+K)×(r+K)`.
fn model_spectrum_top(spec: &FactorMixtureSpec, upto: usize) -> Result<Vec<f64>> {
    let d = spec.dim();
    let r = spec.factor_rank();
    let k = spec.clusters();
    let s = weighted_centroid_factor(spec);
    let mut stacked = Array2::<f64>::zeros((d, r + k));
    if r > 0 {
        stacked
            .slice_mut(ndarray::s![.., ..r])
            .assign(spec.loading());
    }
    stacked.slice_mut(ndarray::s![.., r..]).assign(&s.t());
    let gram = stacked.t().dot(&stacked);
    let (values, _) = symmetric_eigen(&gram)?;
    let s2 = spec.sigma() * spec.sigma();
    let mut out = Vec::with_capacity(upto);
    for i in 0..upto {
        let lambda = if i < values.len() {
            values[i].max(0.0)
        } else {
            0.0
        };
        if i < d {
            out.push(lambda + s2);
        }
    }
    Ok(out)
}

/// Evaluates the assumption diagnostics for a spec, with `k` the declared
/// rank of `E[μμᵀ]`.
pub fn assumption_report(
    spec: &FactorMixtureSpec,
    k: usize,
    opts: &AssumptionOptions,
) -> Result<AssumptionReport> {
    let d = spec.dim();
    if k == 0 || k > d || k > spec.clusters() {
        return Err(Error::validation(format!(
            "declared centroid rank k = {k} must lie in 1..=min(K, d)"
        )));
    }
    if opts.n < 2 {
        return Err(Error::validation("options need n >= 2 for the log n term"));
    }
    let r = spec.factor_rank();
    let sigma = spec.sigma();

    let s = weighted_centroid_factor(spec);
    let mean_norm = {
        let gram = s.dot(&s.t());
        top_eigen(&gram, 1)?.values()[0].max(0.0)
    };
    let mean_rank_zero = mean_norm <= 1e-14;

    let (sigma_min_b, sigma_max_b, u_top_m_norm) = if r == 0 {
        (0.0, 0.0, 0.0)
    } else {
        let gram = spec.loading().t().dot(spec.loading());
        let eig = top_eigen(&gram, r)?;
        let smax = eig.values()[0].max(0.0).sqrt();
        let smin = eig.values()[r - 1].max(0.0).sqrt();

        let norm = if mean_rank_zero {
            0.0
        } else {
            // U: left singular basis of B; M: top-k eigenbasis of E[μμᵀ].
            let u = top_right_singular(&spec.loading().t().to_owned(), r)?;
            let m = top_right_singular(&s, k)?;
            let cross = u.vectors().t().dot(m.vectors());
            let small = cross.t().dot(&cross);
            top_eigen(&small, 1)?.values()[0].max(0.0).sqrt()
        };
        (smin, smax, norm)
    };

    let weak_factor_threshold = 3.0 * (mean_norm + sigma * sigma);
    let weak_factor_ok = r > 0 && sigma_min_b * sigma_min_b >= weak_factor_threshold;

    let log_n = (opts.n as f64).ln();
    let perpendicularity_threshold =
        ((d as f64).sqrt() * sigma.max(1.0 / log_n.sqrt())).min(opts.perp_constant);
    let perpendicularity_ok = u_top_m_norm <= perpendicularity_threshold;

    let eigen_gap = if r == 0 || r >= d {
        0.0
    } else {
        let top = model_spectrum_top(spec, r + 1)?;
        top[r - 1] - top[r]
    };

    Ok(AssumptionReport {
        sigma_min_b,
        sigma_max_b,
        u_top_m_norm,
        pervasiveness_ratio_lo: sigma_min_b * sigma_min_b / d as f64,
        pervasiveness_ratio_hi: sigma_max_b * sigma_max_b / d as f64,
        weak_factor_ok,
        weak_factor_threshold,
        perpendicularity_ok,
        perpendicularity_threshold,
        eigen_gap,
        degenerate_loading: r == 0,
        mean_rank_zero,
    })
}

/// `β`, `ψ` and `ρ` from the spectral-step guarantee.
///
/// `β = (K/n)·min cluster count`; an empty cluster reports `β = 0` with
/// `ψ = NaN` as the undefined sentinel. `ψ` and `ρ` are pure plug-ins of
/// the centroid geometry; no thresholds are enforced here.
#[derive(Debug, Clone)]
pub struct SpectralConditionReport {
    pub beta: f64,
    pub psi: f64,
    pub rho: f64,
}

pub fn spectral_conditions(
    spec: &FactorMixtureSpec,
    labels: &[usize],
    sigma_eff: f64,
    n: usize,
    d: usize,
    k: usize,
) -> Result<SpectralConditionReport> {
    if labels.is_empty() {
        return Err(Error::validation("labels must be nonempty"));
    }
    if sigma_eff.is_nan() || sigma_eff <= 0.0 {
        return Err(Error::validation("sigma_eff must be positive"));
    }
    let clusters = spec.clusters();
    if k == 0 || k > clusters {
        return Err(Error::validation(format!(
            "k = {k} must lie in 1..=K = {clusters}"
        )));
    }
    let mut counts = vec![0usize; clusters];
    for &l in labels {
        if l >= clusters {
            return Err(Error::validation(format!("label {l} out of range")));
        }
        counts[l] += 1;
    }
    let min_count = counts.iter().copied().min().unwrap_or(0);
    let beta = clusters as f64 * min_count as f64 / n as f64;

    let psi = if beta > 0.0 {
        let c = spec.centroids();
        let mut min_gap = f64::INFINITY;
        for i in 0..clusters {
            for j in (i + 1)..clusters {
                let gap = (&c.row(i) - &c.row(j)).mapv(|v| v * v).sum().sqrt();
                min_gap = min_gap.min(gap);
            }
        }
        let denom =
            beta.powf(-0.5) * clusters as f64 * (1.0 + (d as f64 / n as f64).sqrt()) * sigma_eff;
        min_gap / denom
    } else {
        f64::NAN
    };

    // σ_k of the n×d stacked centroid matrix, via the K×K weighted Gram.
    let mut g = spec.centroids().clone();
    for (j, mut row) in g.rows_mut().into_iter().enumerate() {
        row.mapv_inplace(|v| v * (counts[j] as f64).sqrt());
    }
    let gram = g.dot(&g.t());
    let eig = top_eigen(&gram, k)?;
    let sigma_k = eig.values()[k - 1].max(0.0).sqrt();
    let rho = sigma_k / (((n as f64).sqrt() + (d as f64).sqrt()) * sigma_eff);

    Ok(SpectralConditionReport { beta, psi, rho })
}

/// All eigenvalues of the mean-centered sample covariance, descending.
/// Real-data protocol: the data is centralized before the spectrum is read.
pub fn scree(data: &Dataset) -> Result<Vec<f64>> {
    let centered = data.centered();
    let cov = sample_covariance(&centered);
    let (values, _) = symmetric_eigen(&cov)?;
    Ok(values)
}
