//! Augmented Dickey-Fuller and Phillips-Perron unit-root tests.
//!
//! Both tests are left-tailed: the null of a unit root is rejected when the statistic lies
//! below the critical value. Critical values come from MacKinnon's (2010) response surfaces
//! for a single series, `cv(T) = b0 + b1/T + b2/T^2 + b3/T^3`, with `T` the number of
//! observations in the test regression.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::ReturnSeries;
use crate::linalg::least_squares;
use crate::stats::Significance;

/// Minimum number of observations left in the test regression.
pub const MIN_REGRESSION_OBS: usize = 25;

/// Response-surface coefficients `[b0, b1, b2, b3]` for the 1%, 5% and 10% levels.
const MACKINNON_NONE: [[f64; 4]; 3] = [
    [-2.56574, -2.2358, -3.627, 0.0],
    [-1.94100, -0.2686, -3.365, 31.223],
    [-1.61682, 0.2656, -2.714, 25.364],
];
const MACKINNON_CONSTANT: [[f64; 4]; 3] = [
    [-3.43035, -6.5393, -16.786, -79.433],
    [-2.86154, -2.8903, -4.234, -40.040],
    [-2.56677, -1.5384, -2.809, 0.0],
];
const MACKINNON_TREND: [[f64; 4]; 3] = [
    [-3.95877, -9.0531, -28.428, -134.155],
    [-3.41049, -4.3904, -9.036, -45.374],
    [-3.12705, -2.5856, -3.925, -22.380],
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Deterministic {
    None,
    #[default]
    Constant,
    ConstantTrend,
}

impl Deterministic {
    fn n_columns(self) -> usize {
        match self {
            Deterministic::None => 0,
            Deterministic::Constant => 1,
            Deterministic::ConstantTrend => 2,
        }
    }

    fn surface(self) -> &'static [[f64; 4]; 3] {
        match self {
            Deterministic::None => &MACKINNON_NONE,
            Deterministic::Constant => &MACKINNON_CONSTANT,
            Deterministic::ConstantTrend => &MACKINNON_TREND,
        }
    }
}

/// Number of lagged differences in the ADF regression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LagPolicy {
    Fixed(usize),
    /// Minimize AIC over 0..=k_max on a common sample.
    AicMax(usize),
    /// AIC with k_max = floor(12 (T/100)^{1/4}).
    #[default]
    AicSchwert,
}

/// Bartlett-kernel truncation lag for the Phillips-Perron long-run variance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BandwidthPolicy {
    Fixed(usize),
    /// floor(4 (T/100)^{2/9}).
    #[default]
    NeweyWestAuto,
}

pub fn schwert_max_lags(n: usize) -> usize {
    (12.0 * (n as f64 / 100.0).powf(0.25)).floor() as usize
}

pub fn newey_west_bandwidth(n: usize) -> usize {
    (4.0 * (n as f64 / 100.0).powf(2.0 / 9.0)).floor() as usize
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalValues {
    #[serde(rename = "1%")]
    pub one: f64,
    #[serde(rename = "5%")]
    pub five: f64,
    #[serde(rename = "10%")]
    pub ten: f64,
}

impl CriticalValues {
    pub fn mackinnon(deterministic: Deterministic, nobs: usize) -> Self {
        let t = nobs as f64;
        let eval = |b: &[f64; 4]| b[0] + b[1] / t + b[2] / (t * t) + b[3] / (t * t * t);
        let s = deterministic.surface();
        Self {
            one: eval(&s[0]),
            five: eval(&s[1]),
            ten: eval(&s[2]),
        }
    }

    pub fn at(&self, level: Significance) -> f64 {
        match level {
            Significance::OnePercent => self.one,
            Significance::FivePercent => self.five,
            Significance::TenPercent => self.ten,
        }
    }

    /// Strongest level whose critical value the statistic falls below.
    pub fn reject_at(&self, statistic: f64) -> Option<Significance> {
        Significance::ALL.into_iter().find(|&l| statistic < self.at(l))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum UnitRootTest {
    #[serde(rename = "ADF")]
    AugmentedDickeyFuller,
    #[serde(rename = "PP")]
    PhillipsPerron,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitRootResult {
    pub test: UnitRootTest,
    pub statistic: f64,
    /// Lagged differences (ADF) or Bartlett bandwidth (PP).
    pub lags: usize,
    pub nobs: usize,
    pub critical_values: CriticalValues,
    pub reject_at: Option<Significance>,
    pub deterministic: Deterministic,
}

/// ADF regression design built from rows `first..m` of the differenced series.
struct AdfDesign {
    y: DVector<f64>,
    x: DMatrix<f64>,
    /// Column holding the lagged level.
    gamma_col: usize,
}

fn adf_design(levels: &[f64], lags: usize, first: usize, det: Deterministic) -> AdfDesign {
    let dy: Vec<f64> = levels.windows(2).map(|w| w[1] - w[0]).collect();
    let m = dy.len();
    let rows = m - first;
    let k = det.n_columns() + 1 + lags;
    let gamma_col = det.n_columns();
    let mut x = DMatrix::<f64>::zeros(rows, k);
    let mut y = DVector::<f64>::zeros(rows);
    for (r, j) in (first..m).enumerate() {
        y[r] = dy[j];
        match det {
            Deterministic::None => {}
            Deterministic::Constant => x[(r, 0)] = 1.0,
            Deterministic::ConstantTrend => {
                x[(r, 0)] = 1.0;
                x[(r, 1)] = (j + 1) as f64;
            }
        }
        x[(r, gamma_col)] = levels[j];
        for i in 1..=lags {
            x[(r, gamma_col + i)] = dy[j - i];
        }
    }
    AdfDesign { y, x, gamma_col }
}

fn check_length(n: usize, lags: usize) -> Result<()> {
    // n levels -> n-1 differences, minus `lags` initial rows.
    let rows = n.saturating_sub(1).saturating_sub(lags);
    if rows < MIN_REGRESSION_OBS {
        return Err(Error::TooShort {
            needed: MIN_REGRESSION_OBS + lags + 1,
            got: n,
        });
    }
    Ok(())
}

fn select_lags_aic(levels: &[f64], max_lags: usize, det: Deterministic) -> Result<usize> {
    let mut best = (f64::INFINITY, 0);
    for k in 0..=max_lags {
        let d = adf_design(levels, k, max_lags, det);
        let fit = least_squares(&d.y, &d.x)?;
        let n = fit.nobs as f64;
        let aic = n * (fit.rss / n).ln() + 2.0 * fit.ncols as f64;
        if aic < best.0 {
            best = (aic, k);
        }
    }
    Ok(best.1)
}

/// Augmented Dickey-Fuller test on the levels of `r`.
pub fn adf_test(r: &ReturnSeries, det: Deterministic, lag_policy: LagPolicy) -> Result<UnitRootResult> {
    adf_test_values(r.values(), det, lag_policy)
}

/// [`adf_test`] on a raw slice.
pub fn adf_test_values(y: &[f64], det: Deterministic, lag_policy: LagPolicy) -> Result<UnitRootResult> {
    let n = y.len();
    let lags = match lag_policy {
        LagPolicy::Fixed(k) => {
            check_length(n, k)?;
            k
        }
        LagPolicy::AicMax(_) | LagPolicy::AicSchwert => {
            let mut kmax = match lag_policy {
                LagPolicy::AicMax(k) => k,
                _ => schwert_max_lags(n),
            };
            // Cap the search so the common sample keeps enough rows.
            kmax = kmax.min(n.saturating_sub(2 + MIN_REGRESSION_OBS));
            check_length(n, kmax)?;
            select_lags_aic(y, kmax, det)?
        }
    };

    let d = adf_design(y, lags, lags, det);
    let fit = least_squares(&d.y, &d.x)?;
    let se = (fit.sigma2() * fit.xtx_inv[(d.gamma_col, d.gamma_col)]).sqrt();
    let statistic = fit.coefficients[d.gamma_col] / se;
    if !statistic.is_finite() {
        return Err(Error::DegenerateSeries(
            "zero residual variance in ADF regression".into(),
        ));
    }
    let cv = CriticalValues::mackinnon(det, fit.nobs);
    Ok(UnitRootResult {
        test: UnitRootTest::AugmentedDickeyFuller,
        statistic,
        lags,
        nobs: fit.nobs,
        critical_values: cv,
        reject_at: cv.reject_at(statistic),
        deterministic: det,
    })
}

/// Bartlett-weighted long-run variance of `u` with truncation lag `bandwidth`.
pub fn bartlett_long_run_variance(u: &[f64], bandwidth: usize) -> f64 {
    let n = u.len() as f64;
    let autocov = |j: usize| u[j..].iter().zip(u).map(|(a, b)| a * b).sum::<f64>() / n;
    let mut lrv = autocov(0);
    for j in 1..=bandwidth.min(u.len() - 1) {
        let w = 1.0 - j as f64 / (bandwidth as f64 + 1.0);
        lrv += 2.0 * w * autocov(j);
    }
    lrv
}

/// Phillips-Perron Z_t test on the levels of `r`.
pub fn pp_test(r: &ReturnSeries, det: Deterministic, bandwidth: BandwidthPolicy) -> Result<UnitRootResult> {
    pp_test_values(r.values(), det, bandwidth)
}

/// [`pp_test`] on a raw slice.
pub fn pp_test_values(y: &[f64], det: Deterministic, bandwidth: BandwidthPolicy) -> Result<UnitRootResult> {
    check_length(y.len(), 0)?;
    let d = adf_design(y, 0, 0, det);
    let fit = least_squares(&d.y, &d.x)?;
    let t = fit.nobs as f64;
    let u = fit.residuals.as_slice();
    let lags = match bandwidth {
        BandwidthPolicy::Fixed(m) => m,
        BandwidthPolicy::NeweyWestAuto => newey_west_bandwidth(fit.nobs),
    };

    let gamma0 = fit.rss / t;
    let lrv = bartlett_long_run_variance(u, lags);
    let s = fit.sigma2().sqrt();
    let se = s * fit.xtx_inv[(d.gamma_col, d.gamma_col)].sqrt();
    let t_gamma = fit.coefficients[d.gamma_col] / se;
    if lrv.is_nan() || lrv <= 0.0 || !t_gamma.is_finite() {
        return Err(Error::DegenerateSeries(
            "zero residual variance in PP regression".into(),
        ));
    }
    let lambda = lrv.sqrt();
    let statistic = (gamma0 / lrv).sqrt() * t_gamma - 0.5 * (lrv - gamma0) / lambda * (t * se / s);

    let cv = CriticalValues::mackinnon(det, fit.nobs);
    Ok(UnitRootResult {
        test: UnitRootTest::PhillipsPerron,
        statistic,
        lags,
        nobs: fit.nobs,
        critical_values: cv,
        reject_at: cv.reject_at(statistic),
        deterministic: det,
    })
}
