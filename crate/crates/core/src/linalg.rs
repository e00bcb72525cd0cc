//! Least-squares core used by the unit-root, LM and regression modules.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Relative threshold on |R_jj| / ||x_j|| below which a column counts as collinear.
const RANK_TOL: f64 = 1e-10;

/// Ordinary least-squares solution obtained from a Householder QR factorization.
#[derive(Debug, Clone)]
pub struct LeastSquares {
    pub coefficients: DVector<f64>,
    pub residuals: DVector<f64>,
    /// (X'X)^{-1}
    pub xtx_inv: DMatrix<f64>,
    pub rss: f64,
    pub nobs: usize,
    pub ncols: usize,
}

impl LeastSquares {
    /// Residual variance with the n-k denominator.
    pub fn sigma2(&self) -> f64 {
        self.rss / (self.nobs - self.ncols) as f64
    }

    /// Classical covariance matrix s^2 (X'X)^{-1}.
    pub fn classical_cov(&self) -> DMatrix<f64> {
        &self.xtx_inv * self.sigma2()
    }

    /// HC1 heteroskedasticity-robust covariance matrix.
    pub fn hc1_cov(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        let k = self.ncols;
        let mut meat = DMatrix::<f64>::zeros(k, k);
        for (i, row) in x.row_iter().enumerate() {
            let e2 = self.residuals[i] * self.residuals[i];
            for a in 0..k {
                let ra = row[a] * e2;
                for b in a..k {
                    meat[(a, b)] += ra * row[b];
                }
            }
        }
        for a in 0..k {
            for b in 0..a {
                meat[(a, b)] = meat[(b, a)];
            }
        }
        let scale = self.nobs as f64 / (self.nobs - k) as f64;
        &self.xtx_inv * meat * &self.xtx_inv * scale
    }

    /// Centered R^2 of the fit against `y`.
    pub fn r_squared(&self, y: &DVector<f64>) -> f64 {
        let m = y.mean();
        let tss: f64 = y.iter().map(|v| (v - m) * (v - m)).sum();
        if tss <= 0.0 {
            return 0.0;
        }
        1.0 - self.rss / tss
    }
}

/// Solve min ||y - X b||^2.
///
/// Fails with [`Error::SingularDesign`] when a column is numerically a linear combination
/// of the columns before it, and with [`Error::TooShort`] when there are no residual degrees
/// of freedom.
pub fn least_squares(y: &DVector<f64>, x: &DMatrix<f64>) -> Result<LeastSquares> {
    let (n, k) = x.shape();
    if y.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "{} responses for {} design rows",
            y.len(),
            n
        )));
    }
    if n <= k {
        return Err(Error::TooShort { needed: k + 1, got: n });
    }
    if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("regression data".into()));
    }

    let qr = x.clone().qr();
    let r = qr.r();
    for j in 0..k {
        let norm = x.column(j).norm();
        if norm == 0.0 || r[(j, j)].abs() <= RANK_TOL * norm {
            return Err(Error::SingularDesign { column: j });
        }
    }
    let q = qr.q();
    let qty = q.transpose() * y;
    let coefficients = r
        .solve_upper_triangular(&qty)
        .ok_or(Error::SingularDesign { column: k - 1 })?;
    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(k, k))
        .ok_or(Error::SingularDesign { column: k - 1 })?;
    let xtx_inv = &r_inv * r_inv.transpose();
    let residuals = y - x * &coefficients;
    let rss = residuals.norm_squared();

    Ok(LeastSquares {
        coefficients,
        residuals,
        xtx_inv,
        rss,
        nobs: n,
        ncols: k,
    })
}
