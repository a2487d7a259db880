//! Cyclic Jacobi eigensolver for dense symmetric matrices.
//!
//! Rotations are applied in row-cyclic order until the off-diagonal mass
//! drops below a small multiple of machine precision relative to the
//! Frobenius norm. Quadratic convergence makes a handful of sweeps enough
//! for the matrix sizes this crate works with (d up to a few thousand).

use ndarray::Array2;

use crate::error::{Error, Result};

/// Hard cap on sweeps; the solver normally needs fewer than 20.
pub(crate) fn max_sweeps(dim: usize) -> usize {
    100 * dim.max(1)
}

/// Full eigendecomposition of a symmetric matrix.
///
/// Returns `(values, vectors)` with eigenvalues sorted descending and the
/// eigenvector for `values[j]` in column `j` of `vectors`.
pub fn symmetric_eigen(matrix: &Array2<f64>) -> Result<(Vec<f64>, Array2<f64>)> {
    let d = matrix.nrows();
    if matrix.ncols() != d {
        return Err(Error::validation(format!(
            "eigendecomposition requires a square matrix, got {}x{}",
            d,
            matrix.ncols()
        )));
    }
    if d == 0 {
        return Err(Error::validation("eigendecomposition of an empty matrix"));
    }

    let mut a = matrix.clone();
    let mut v = Array2::<f64>::eye(d);

    let frob: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let tol = 1e-14 * frob.max(f64::MIN_POSITIVE);

    let mut converged = false;
    for _ in 0..max_sweeps(d) {
        let off = off_diagonal_norm(&a);
        if off <= tol {
            converged = true;
            break;
        }
        for p in 0..d {
            for q in (p + 1)..d {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged && off_diagonal_norm(&a) > tol {
        return Err(Error::Numerical {
            msg: "Jacobi sweeps exhausted before reaching tolerance".into(),
            residual: off_diagonal_norm(&a),
        });
    }

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| a[[j, j]].partial_cmp(&a[[i, i]]).unwrap());

    let values: Vec<f64> = order.iter().map(|&i| a[[i, i]]).collect();
    let mut vectors = Array2::<f64>::zeros((d, d));
    for (out_col, &in_col) in order.iter().enumerate() {
        for row in 0..d {
            vectors[[row, out_col]] = v[[row, in_col]];
        }
    }
    Ok((values, vectors))
}

fn off_diagonal_norm(a: &Array2<f64>) -> f64 {
    let d = a.nrows();
    let mut sum = 0.0;
    for p in 0..d {
        for q in (p + 1)..d {
            sum += 2.0 * a[[p, q]] * a[[p, q]];
        }
    }
    sum.sqrt()
}

/// One Givens rotation zeroing `a[p, q]`, accumulated into `v`.
fn rotate(a: &mut Array2<f64>, v: &mut Array2<f64>, p: usize, q: usize) {
    let apq = a[[p, q]];
    if apq == 0.0 {
        return;
    }
    let app = a[[p, p]];
    let aqq = a[[q, q]];
    let theta = (aqq - app) / (2.0 * apq);
    // Stable tangent of the smaller rotation angle.
    let t = if theta >= 0.0 {
        1.0 / (theta + (1.0 + theta * theta).sqrt())
    } else {
        1.0 / (theta - (1.0 + theta * theta).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let tau = s / (1.0 + c);

    a[[p, p]] = app - t * apq;
    a[[q, q]] = aqq + t * apq;
    a[[p, q]] = 0.0;
    a[[q, p]] = 0.0;

    let d = a.nrows();
    for i in 0..d {
        if i != p && i != q {
            let aip = a[[i, p]];
            let aiq = a[[i, q]];
            let new_ip = aip - s * (aiq + tau * aip);
            let new_iq = aiq + s * (aip - tau * aiq);
            a[[i, p]] = new_ip;
            a[[p, i]] = new_ip;
            a[[i, q]] = new_iq;
            a[[q, i]] = new_iq;
        }
    }
    for i in 0..d {
        let vip = v[[i, p]];
        let viq = v[[i, q]];
        v[[i, p]] = vip - s * (viq + tau * vip);
        v[[i, q]] = viq + s * (vip - tau * viq);
    }
}
