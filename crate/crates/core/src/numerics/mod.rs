//! Spectral machinery: symmetric eigendecomposition, top singular subspaces,
//! projectors, subspace distances and a positive-definite solver.
//!
//! Right singular subspaces are always computed from the smaller Gram matrix
//! (`XᵀX` when `d ≤ n`, `XXᵀ` otherwise) since only subspaces of dimension
//! well below `min(n, d)` are ever consumed.

mod jacobi;

pub use jacobi::symmetric_eigen;

use ndarray::{Array1, Array2};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// Orthonormal column basis with its associated eigenvalues (or squared
/// singular values), sorted descending.
///
/// Columns follow a fixed sign convention: the first entry of each column
/// larger than `1e-12` in magnitude is positive. Matrices with eigenvalue
/// gaps below roughly `1e-10` can return any orthonormal basis of the
/// invariant subspace, so comparisons should go through projectors.
#[derive(Debug, Clone)]
pub struct SpectralBasis {
    vectors: Array2<f64>,
    values: Vec<f64>,
}

impl SpectralBasis {
    /// Wraps an orthonormal basis, enforcing the sign convention.
    pub fn new(mut vectors: Array2<f64>, values: Vec<f64>) -> Result<Self> {
        if vectors.ncols() != values.len() {
            return Err(Error::validation(
                "basis column count does not match the number of values",
            ));
        }
        for w in values.windows(2) {
            if w[0] < w[1] {
                return Err(Error::validation("basis values must be sorted descending"));
            }
        }
        let m = vectors.ncols();
        let mut max_dev: f64 = 0.0;
        for i in 0..m {
            for j in i..m {
                let dot = vectors.column(i).dot(&vectors.column(j));
                let target = if i == j { 1.0 } else { 0.0 };
                max_dev = max_dev.max((dot - target).abs());
            }
        }
        if max_dev > 1e-8 {
            return Err(Error::Numerical {
                msg: "basis columns are not orthonormal".into(),
                residual: max_dev,
            });
        }
        apply_sign_convention(&mut vectors);
        Ok(SpectralBasis { vectors, values })
    }

    /// `d×m` matrix of basis columns.
    pub fn vectors(&self) -> &Array2<f64> {
        &self.vectors
    }

    /// Eigenvalues or squared singular values, descending.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Ambient dimension `d`.
    pub fn dim(&self) -> usize {
        self.vectors.nrows()
    }

    /// Number of basis columns `m`.
    pub fn len(&self) -> usize {
        self.vectors.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn apply_sign_convention(vectors: &mut Array2<f64>) {
    for mut col in vectors.columns_mut() {
        if let Some(first) = col.iter().find(|v| v.abs() > 1e-12) {
            if *first < 0.0 {
                col.mapv_inplace(|v| -v);
            }
        }
    }
}

/// Projection defined by a basis, either onto its span (as embedding
/// coordinates) or onto the orthogonal complement (in the ambient space).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProjectorMode {
    Onto,
    Complement,
}

#[derive(Debug, Clone)]
pub struct Projector {
    pub basis: SpectralBasis,
    pub mode: ProjectorMode,
}

/// Uncentered second-moment matrix `(1/n) Σ xᵢ xᵢᵀ`, exactly symmetric.
pub fn sample_covariance(data: &Dataset) -> Array2<f64> {
    let x = data.matrix();
    let (n, d) = (x.nrows(), x.ncols());
    let mut cov = Array2::<f64>::zeros((d, d));
    for i in 0..d {
        for j in i..d {
            let mut acc = 0.0;
            for row in 0..n {
                acc += x[[row, i]] * x[[row, j]];
            }
            acc /= n as f64;
            cov[[i, j]] = acc;
            cov[[j, i]] = acc;
        }
    }
    cov
}

/// Leading `m` eigenpairs of a symmetric matrix.
pub fn top_eigen(matrix: &Array2<f64>, m: usize) -> Result<SpectralBasis> {
    let d = matrix.nrows();
    if matrix.ncols() != d {
        return Err(Error::validation(format!(
            "top_eigen requires a square matrix, got {}x{}",
            d,
            matrix.ncols()
        )));
    }
    if m == 0 || m > d {
        return Err(Error::validation(format!(
            "requested {m} eigenpairs from a {d}x{d} matrix"
        )));
    }
    let mut asym: f64 = 0.0;
    for i in 0..d {
        for j in (i + 1)..d {
            let dev = (matrix[[i, j]] - matrix[[j, i]]).abs()
                / (1.0 + matrix[[i, j]].abs() + matrix[[j, i]].abs());
            asym = asym.max(dev);
        }
    }
    if asym > 1e-8 {
        return Err(Error::validation(format!(
            "matrix is not symmetric (relative deviation {asym:e})"
        )));
    }

    let (values, vectors) = symmetric_eigen(matrix)?;
    let top_values = values[..m].to_vec();
    let top_vectors = vectors.slice(ndarray::s![.., ..m]).to_owned();
    let basis = SpectralBasis::new(top_vectors, top_values)?;
    check_eigen_residuals(matrix, &basis)?;
    Ok(basis)
}

fn check_eigen_residuals(matrix: &Array2<f64>, basis: &SpectralBasis) -> Result<()> {
    for (j, &lambda) in basis.values().iter().enumerate() {
        let v = basis.vectors().column(j);
        let mv = matrix.dot(&v);
        let mut res = 0.0;
        for i in 0..v.len() {
            let r = mv[i] - lambda * v[i];
            res += r * r;
        }
        let res = res.sqrt();
        if res > 1e-8 * (1.0 + lambda.abs()) {
            return Err(Error::Numerical {
                msg: format!("eigenpair {j} residual exceeds tolerance"),
                residual: res,
            });
        }
    }
    Ok(())
}

/// Top `k` right singular vectors of `x`, with squared singular values.
///
/// Routed through the smaller Gram matrix: `xᵀx` when `d ≤ n`, otherwise
/// `xxᵀ` with the eigenvectors mapped back through `xᵀ`.
pub fn top_right_singular(x: &Array2<f64>, k: usize) -> Result<SpectralBasis> {
    let (n, d) = (x.nrows(), x.ncols());
    if k == 0 || k > n.min(d) {
        return Err(Error::validation(format!(
            "requested {k} singular vectors from a {n}x{d} matrix"
        )));
    }
    if d <= n {
        let gram = gram_columns(x);
        return top_eigen(&gram, k);
    }

    // d > n: eigendecompose the n×n row Gram and map w ↦ xᵀw / s.
    let gram = gram_rows(x);
    let (values, vectors) = symmetric_eigen(&gram)?;
    let mut cols = Array2::<f64>::zeros((d, k));
    let mut out_values = Vec::with_capacity(k);
    let scale = values.first().copied().unwrap_or(0.0).max(1.0);
    for j in 0..k {
        let lambda = values[j].max(0.0);
        out_values.push(lambda);
        if lambda > 1e-12 * scale {
            let w = vectors.column(j);
            let v = x.t().dot(&w);
            let s = lambda.sqrt();
            for i in 0..d {
                cols[[i, j]] = v[i] / s;
            }
        } else {
            // Rank-deficient tail: fill with any unit vector orthogonal to
            // the columns found so far.
            let v = orthogonal_completion(&cols, j)?;
            for i in 0..d {
                cols[[i, j]] = v[i];
            }
        }
    }
    SpectralBasis::new(cols, out_values)
}

/// `xᵀx` (d×d), exactly symmetric.
fn gram_columns(x: &Array2<f64>) -> Array2<f64> {
    let (n, d) = (x.nrows(), x.ncols());
    let mut g = Array2::<f64>::zeros((d, d));
    for i in 0..d {
        for j in i..d {
            let mut acc = 0.0;
            for row in 0..n {
                acc += x[[row, i]] * x[[row, j]];
            }
            g[[i, j]] = acc;
            g[[j, i]] = acc;
        }
    }
    g
}

/// `xxᵀ` (n×n), exactly symmetric.
fn gram_rows(x: &Array2<f64>) -> Array2<f64> {
    let (n, _) = (x.nrows(), x.ncols());
    let mut g = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        for j in i..n {
            let acc = x.row(i).dot(&x.row(j));
            g[[i, j]] = acc;
            g[[j, i]] = acc;
        }
    }
    g
}

fn orthogonal_completion(cols: &Array2<f64>, filled: usize) -> Result<Array1<f64>> {
    let d = cols.nrows();
    for candidate in 0..d {
        let mut v = Array1::<f64>::zeros(d);
        v[candidate] = 1.0;
        for j in 0..filled {
            let col = cols.column(j);
            let dot = col.dot(&v);
            for i in 0..d {
                v[i] -= dot * col[i];
            }
        }
        let norm = v.dot(&v).sqrt();
        if norm > 0.5 {
            return Ok(v.mapv(|t| t / norm));
        }
    }
    Err(Error::Numerical {
        msg: "failed to complete an orthonormal basis".into(),
        residual: f64::NAN,
    })
}

/// Applies a projector to every row of a dataset.
///
/// `Onto` returns the `n×m` embedding coordinates `xᵢᵀV`; `Complement`
/// returns `xᵢ − VVᵀxᵢ` in the original `n×d` space. Labels pass through.
pub fn project(projector: &Projector, data: &Dataset) -> Result<Dataset> {
    let x = data.matrix();
    let v = projector.basis.vectors();
    if x.ncols() != v.nrows() {
        return Err(Error::validation(format!(
            "projector dimension {} does not match data dimension {}",
            v.nrows(),
            x.ncols()
        )));
    }
    let embedded = x.dot(v);
    let projected = match projector.mode {
        ProjectorMode::Onto => embedded,
        ProjectorMode::Complement => {
            let mut out = x.to_owned();
            out -= &embedded.dot(&v.t());
            out
        }
    };
    Ok(data.with_matrix(projected))
}

/// Spectral norm of the projector difference `‖AAᵀ − BBᵀ‖`.
///
/// Zero iff the spans coincide; at most 1 when the column counts match.
/// Computed by power iteration on the squared difference operator,
/// tolerance `1e-9`, capped at 10000 iterations with a randomized restart
/// every 2500 iterations if the estimate stagnates.
pub fn subspace_distance(a: &SpectralBasis, b: &SpectralBasis) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::validation(format!(
            "subspace ambient dimensions differ: {} vs {}",
            a.dim(),
            b.dim()
        )));
    }
    if a.len() != b.len() {
        return Err(Error::validation(format!(
            "subspace column counts differ: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    let d = a.dim();
    let av = a.vectors();
    let bv = b.vectors();
    // D x = A(Aᵀx) − B(Bᵀx), never forming the d×d difference.
    let apply =
        |x: &Array1<f64>| -> Array1<f64> { av.dot(&av.t().dot(x)) - bv.dot(&bv.t().dot(x)) };

    let mut rng = ChaCha8Rng::seed_from_u64(0x5a5c_ba51);
    let mut x = random_unit(&mut rng, d);
    let mut prev = f64::INFINITY;
    let mut last = 0.0;
    for iter in 0..10_000u32 {
        let y = apply(&apply(&x));
        let nu = y.dot(&y).sqrt();
        if nu < 1e-30 {
            return Ok(0.0);
        }
        let sigma = nu.sqrt();
        last = sigma;
        if (sigma - prev).abs() <= 1e-9 * sigma.max(1.0) {
            // Equal column counts make the difference of projectors a
            // contraction, so round the estimate down to the exact cap.
            return Ok(sigma.min(1.0));
        }
        prev = sigma;
        x = y.mapv(|t| t / nu);
        if iter.is_multiple_of(2500) && iter > 0 {
            let noise = random_unit(&mut rng, d);
            x = &x + &noise.mapv(|t| 0.5 * t);
            let norm = x.dot(&x).sqrt();
            x.mapv_inplace(|t| t / norm);
            prev = f64::INFINITY;
        }
    }
    Ok(last.min(1.0))
}

fn random_unit(rng: &mut ChaCha8Rng, d: usize) -> Array1<f64> {
    let mut v = Array1::<f64>::zeros(d);
    loop {
        for i in 0..d {
            v[i] = rng.gen::<f64>() - 0.5;
        }
        let norm = v.dot(&v).sqrt();
        if norm > 1e-6 {
            v.mapv_inplace(|t| t / norm);
            return v;
        }
    }
}

/// Solves `A z = b` for symmetric positive definite `A` via Cholesky.
pub fn solve_spd(a: &Array2<f64>, b: &Array1<f64>) -> Result<Array1<f64>> {
    let d = a.nrows();
    if a.ncols() != d || b.len() != d {
        return Err(Error::validation("solve_spd: dimension mismatch"));
    }
    let mut l = Array2::<f64>::zeros((d, d));
    for i in 0..d {
        for j in 0..=i {
            let mut acc = a[[i, j]];
            for k in 0..j {
                acc -= l[[i, k]] * l[[j, k]];
            }
            if i == j {
                if acc <= 0.0 {
                    return Err(Error::Numerical {
                        msg: "matrix is not positive definite".into(),
                        residual: acc,
                    });
                }
                l[[i, j]] = acc.sqrt();
            } else {
                l[[i, j]] = acc / l[[j, j]];
            }
        }
    }
    // Forward then back substitution.
    let mut y = Array1::<f64>::zeros(d);
    for i in 0..d {
        let mut acc = b[i];
        for k in 0..i {
            acc -= l[[i, k]] * y[k];
        }
        y[i] = acc / l[[i, i]];
    }
    let mut z = Array1::<f64>::zeros(d);
    for i in (0..d).rev() {
        let mut acc = y[i];
        for k in (i + 1)..d {
            acc -= l[[k, i]] * z[k];
        }
        z[i] = acc / l[[i, i]];
    }
    Ok(z)
}
