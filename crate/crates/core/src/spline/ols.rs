use serde::{Deserialize, Serialize};

use super::{design_matrix, Dataset, DesignMatrix, SplineSpec};
use crate::error::{Error, Result};

/// Pivots smaller than this, relative to the largest, count as rank loss.
/// Columns are normalized first, so the threshold is scale free.
pub const RANK_TOL: f64 = 1e-10;

/// Floor on the residual variance, relative to `mean(y²)`. Keeps the
/// likelihood finite on exactly interpolated data.
pub const VARIANCE_FLOOR: f64 = 1e-16;

/// Least-squares solution of `X b ≈ y` for a full-rank `X`.
#[derive(Clone, Debug, PartialEq)]
pub struct LeastSquares {
    pub coefficients: Vec<f64>,
    pub residuals: Vec<f64>,
    pub rss: f64,
}

/// Solves least squares by Householder QR with column pivoting.
///
/// Returns [`Error::RankDeficient`] when a column is zero or numerically
/// dependent on the others.
pub fn least_squares(x: &DesignMatrix, y: &[f64]) -> Result<LeastSquares> {
    let (n, c) = (x.rows(), x.cols());
    assert_eq!(y.len(), n, "response length must match design rows");
    if n < c {
        return Err(Error::TooFewObservations { n, columns: c });
    }

    let mut a = x.as_column_major().to_vec();
    let mut scale = vec![0.0; c];
    for (j, s) in scale.iter_mut().enumerate() {
        let col = &mut a[j * n..(j + 1) * n];
        let norm = col.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::RankDeficient);
        }
        col.iter_mut().for_each(|v| *v /= norm);
        *s = norm;
    }

    let mut qty = y.to_vec();
    let mut perm: Vec<usize> = (0..c).collect();
    let mut diag = vec![0.0; c];
    let mut v = vec![0.0; n];
    let mut largest = 0.0_f64;
    // Squared tail norms, downdated after each reflection.
    let mut tail = vec![1.0; c];

    for k in 0..c {
        let p = (k..c).fold(k, |best, j| if tail[j] > tail[best] { j } else { best });
        if p != k {
            for i in 0..n {
                a.swap(k * n + i, p * n + i);
            }
            perm.swap(k, p);
            tail.swap(k, p);
        }

        let col = &a[k * n + k..(k + 1) * n];
        let norm = dot(col, col).sqrt();
        if k == 0 {
            largest = norm;
        }
        if norm.is_nan() || norm <= RANK_TOL * largest {
            return Err(Error::RankDeficient);
        }
        let alpha = if col[0] > 0.0 { -norm } else { norm };
        let m = n - k;
        v[..m].copy_from_slice(col);
        v[0] -= alpha;
        let vv = dot(&v[..m], &v[..m]);
        diag[k] = alpha;

        if vv > 0.0 {
            for j in k + 1..c {
                let cj = &mut a[j * n + k..(j + 1) * n];
                let f = 2.0 * dot(cj, &v[..m]) / vv;
                cj.iter_mut().zip(&v[..m]).for_each(|(p, q)| *p -= f * q);
                let lead = cj[0];
                tail[j] -= lead * lead;
                if tail[j] < 1e-3 * (tail[j] + lead * lead) {
                    tail[j] = dot(&cj[1..], &cj[1..]);
                }
            }
            let yk = &mut qty[k..];
            let f = 2.0 * dot(yk, &v[..m]) / vv;
            yk.iter_mut().zip(&v[..m]).for_each(|(p, q)| *p -= f * q);
        }
    }

    // Back substitution on R (upper triangle of `a`, diagonal in `diag`).
    let mut z = vec![0.0; c];
    for k in (0..c).rev() {
        let mut s = qty[k];
        for j in k + 1..c {
            s -= a[j * n + k] * z[j];
        }
        z[k] = s / diag[k];
    }
    let mut coefficients = vec![0.0; c];
    for (k, &j) in perm.iter().enumerate() {
        coefficients[j] = z[k] / scale[j];
    }

    let fitted = x.multiply(&coefficients);
    let residuals: Vec<f64> = y.iter().zip(&fitted).map(|(yi, fi)| yi - fi).collect();
    let rss = residuals.iter().map(|r| r * r).sum();
    Ok(LeastSquares {
        coefficients,
        residuals,
        rss,
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0; 4];
    let (ca, cb) = (a.chunks_exact(4), b.chunks_exact(4));
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        for l in 0..4 {
            acc[l] += x[l] * y[l];
        }
    }
    let tail: f64 = ra.iter().zip(rb).map(|(x, y)| x * y).sum();
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// Profile fit of a spline with fixed knots.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplineFit {
    /// Polynomial coefficients followed by one coefficient per knot.
    pub coefficients: Vec<f64>,
    pub sigma2_hat: f64,
    pub log_likelihood: f64,
    /// `n - c`, the divisor of the residual sum of squares.
    pub dof_denominator: usize,
    pub rss: f64,
}

/// Ordinary least squares for `spec` on `data`, with the Gaussian profile
/// log-likelihood at `σ̂² = RSS / (n - c)`.
pub fn ols_fit(spec: &SplineSpec, data: &Dataset) -> Result<SplineFit> {
    let c = spec.n_columns();
    let n = data.len();
    if n <= c + 1 {
        return Err(Error::TooFewObservations { n, columns: c });
    }
    let x = design_matrix(spec, data.x());
    let ls = least_squares(&x, data.y())?;
    let dof = n - c;
    let mean_sq = data.y().iter().map(|v| v * v).sum::<f64>() / n as f64;
    let floor = (VARIANCE_FLOOR * mean_sq).max(f64::MIN_POSITIVE);
    let sigma2_hat = (ls.rss / dof as f64).max(floor);
    let log_likelihood = -0.5 * n as f64 * (2.0 * std::f64::consts::PI * sigma2_hat).ln() - ls.rss / (2.0 * sigma2_hat);
    Ok(SplineFit {
        coefficients: ls.coefficients,
        sigma2_hat,
        log_likelihood,
        dof_denominator: dof,
        rss: ls.rss,
    })
}
