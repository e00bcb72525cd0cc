//! Lagrange-multiplier tests for ARCH effects and heteroskedasticity.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::least_squares;
use crate::stats;

pub const DEFAULT_ARCH_LAGS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LmTestResult {
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
    pub lag_order: usize,
}

impl LmTestResult {
    fn new(statistic: f64, df: usize, lag_order: usize) -> Self {
        let statistic = statistic.max(0.0);
        Self {
            statistic,
            df,
            p_value: stats::chi2_sf(statistic, df),
            lag_order,
        }
    }
}

/// Residuals of a constant-mean model.
pub fn demean(x: &[f64]) -> Vec<f64> {
    let m = stats::mean(x);
    x.iter().map(|v| v - m).collect()
}

/// Engle's ARCH-LM test: T * R^2 from regressing squared residuals on `q` of their own lags.
pub fn arch_lm_test(residuals: &[f64], q: usize) -> Result<LmTestResult> {
    let n = residuals.len();
    if q == 0 {
        return Err(Error::InvalidDesign("ARCH-LM needs at least one lag".into()));
    }
    if n <= q + 10 {
        return Err(Error::TooShort { needed: q + 11, got: n });
    }
    let e2: Vec<f64> = residuals.iter().map(|e| e * e).collect();
    let rows = n - q;
    let y = DVector::from_iterator(rows, e2[q..].iter().copied());
    let x = DMatrix::from_fn(rows, q + 1, |r, c| if c == 0 { 1.0 } else { e2[r + q - c] });
    let fit = least_squares(&y, &x)?;
    Ok(LmTestResult::new(rows as f64 * fit.r_squared(&y), q, q))
}

/// Breusch-Pagan-Godfrey test: T * R^2 from regressing the squared OLS residuals of `y` on `x`
/// against the same regressors. `x` must contain an intercept column.
pub fn breusch_pagan_test(y: &[f64], x: &DMatrix<f64>) -> Result<LmTestResult> {
    let (n, k) = x.shape();
    if n != y.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} observations for {} design rows",
            y.len(),
            n
        )));
    }
    if k < 2 {
        return Err(Error::InvalidDesign(
            "Breusch-Pagan needs at least one regressor besides the intercept".into(),
        ));
    }
    let yv = DVector::from_column_slice(y);
    let fit = least_squares(&yv, x)?;
    let e2 = fit.residuals.map(|e| e * e);
    let aux = least_squares(&e2, x)?;
    Ok(LmTestResult::new(n as f64 * aux.r_squared(&e2), k - 1, 0))
}

/// Intercept plus linear time trend, the design used for single-series heteroskedasticity checks.
pub fn trend_design(n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, 2, |r, c| if c == 0 { 1.0 } else { (r + 1) as f64 })
}
