//! OLS and iterated Prais-Winsten regressions, and the crisis-dummy safe-haven regression
//!
//! ```text
//! asset_t = g + b1 asset_{t-1} + b2 index_t + b3 D_t index_t + b4 index_{t-1} + e_t
//! ```
//!
//! where `D_t` is one on the announcement observation and the following `horizon` observations.

use chrono::{Days, NaiveDate};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::ReturnSeries;
use crate::linalg::{least_squares, LeastSquares};
use crate::stats;

pub const DEFAULT_HORIZON: usize = 14;
pub const MIN_PW_OBS: usize = 30;
/// |rho| is kept below this so the first-row transform stays real.
const RHO_BOUND: f64 = 0.999;

pub fn default_announcement() -> NaiveDate {
    NaiveDate::from_ymd_opt(2020, 3, 11).expect("valid date")
}

/// How the dummy's horizon is counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DayMode {
    /// `horizon` subsequent observations of the aligned sample.
    #[default]
    TradingDays,
    /// Every observation dated within `horizon` calendar days after the announcement.
    CalendarDays,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovidDummy {
    pub announcement_date: NaiveDate,
    /// First sample date on or after the announcement.
    pub effective_date: NaiveDate,
    pub horizon: usize,
    pub mode: DayMode,
    pub dates: Vec<NaiveDate>,
    pub indicator: Vec<f64>,
    /// The sample ends before the window is complete.
    pub partial: bool,
}

impl CovidDummy {
    pub fn value_on(&self, date: NaiveDate) -> Option<f64> {
        self.dates.binary_search(&date).ok().map(|i| self.indicator[i])
    }

    /// First and last dates with indicator one.
    pub fn window(&self) -> (NaiveDate, NaiveDate) {
        let on: Vec<NaiveDate> = self
            .dates
            .iter()
            .zip(&self.indicator)
            .filter(|(_, v)| **v == 1.0)
            .map(|(d, _)| *d)
            .collect();
        (on[0], on[on.len() - 1])
    }

    pub fn active_count(&self) -> usize {
        self.indicator.iter().filter(|v| **v == 1.0).count()
    }
}

/// Crisis indicator over `dates`.
///
/// When the announcement date itself is absent, the window opens on the next available date.
/// A window cut short by the end of the sample is returned with `partial = true`.
pub fn build_covid_dummy(
    dates: &[NaiveDate],
    announcement: NaiveDate,
    horizon: usize,
    mode: DayMode,
) -> Result<CovidDummy> {
    let start = dates
        .iter()
        .position(|d| *d >= announcement)
        .ok_or_else(|| Error::WindowOutOfRange(format!("sample ends before the announcement date {announcement}")))?;
    let (indicator, partial): (Vec<f64>, bool) = match mode {
        DayMode::TradingDays => {
            let end = start + horizon;
            let ind = (0..dates.len())
                .map(|i| if i >= start && i <= end { 1.0 } else { 0.0 })
                .collect();
            (ind, end >= dates.len())
        }
        DayMode::CalendarDays => {
            let last = announcement + Days::new(horizon as u64);
            let ind = dates
                .iter()
                .map(|d| if *d >= announcement && *d <= last { 1.0 } else { 0.0 })
                .collect();
            (ind, dates[dates.len() - 1] < last)
        }
    };
    Ok(CovidDummy {
        announcement_date: announcement,
        effective_date: dates[start],
        horizon,
        mode,
        dates: dates.to_vec(),
        indicator,
        partial,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CovarianceKind {
    Classical,
    #[default]
    Hc1,
}

/// A design matrix with named columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Design {
    pub names: Vec<String>,
    pub matrix: DMatrix<f64>,
}

impl Design {
    pub fn new(names: &[&str], matrix: DMatrix<f64>) -> Result<Self> {
        if names.len() != matrix.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "{} names for {} columns",
                names.len(),
                matrix.ncols()
            )));
        }
        Ok(Self {
            names: names.iter().map(|s| s.to_string()).collect(),
            matrix,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coefficient {
    pub name: String,
    pub estimate: f64,
    pub std_error: f64,
    pub t_stat: f64,
    /// Two-sided, standard normal reference.
    pub p_value: f64,
}

impl Coefficient {
    pub fn stars(&self) -> &'static str {
        stats::stars(self.p_value)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionResult {
    pub coefficients: Vec<Coefficient>,
    /// AR(1) error coefficient; zero for plain OLS.
    pub rho_ar1: f64,
    pub n_obs: usize,
    pub iterations: usize,
    pub covariance: CovarianceKind,
    #[serde(skip)]
    pub residuals: Vec<f64>,
}

impl RegressionResult {
    pub fn get(&self, name: &str) -> Option<&Coefficient> {
        self.coefficients.iter().find(|c| c.name == name)
    }

    pub fn estimates(&self) -> Vec<f64> {
        self.coefficients.iter().map(|c| c.estimate).collect()
    }
}

fn summarize(
    fit: &LeastSquares,
    x: &DMatrix<f64>,
    names: &[String],
    kind: CovarianceKind,
    rho: f64,
    iterations: usize,
    residuals: Vec<f64>,
) -> RegressionResult {
    let cov = match kind {
        CovarianceKind::Classical => fit.classical_cov(),
        CovarianceKind::Hc1 => fit.hc1_cov(x),
    };
    let coefficients = names
        .iter()
        .enumerate()
        .map(|(j, name)| {
            let estimate = fit.coefficients[j];
            let std_error = cov[(j, j)].max(0.0).sqrt();
            let t_stat = estimate / std_error;
            Coefficient {
                name: name.clone(),
                estimate,
                std_error,
                t_stat,
                p_value: stats::normal_two_sided_p(t_stat),
            }
        })
        .collect();
    RegressionResult {
        coefficients,
        rho_ar1: rho,
        n_obs: fit.nobs,
        iterations,
        covariance: kind,
        residuals,
    }
}

/// Closed-form least squares.
pub fn ols_fit(y: &[f64], design: &Design, kind: CovarianceKind) -> Result<RegressionResult> {
    let yv = DVector::from_column_slice(y);
    let fit = least_squares(&yv, &design.matrix)?;
    let residuals = fit.residuals.as_slice().to_vec();
    Ok(summarize(&fit, &design.matrix, &design.names, kind, 0.0, 0, residuals))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PraisWinstenOptions {
    /// Zero skips the AR(1) correction entirely.
    pub max_iter: usize,
    pub rho_tol: f64,
}

impl Default for PraisWinstenOptions {
    fn default() -> Self {
        Self {
            // With a lagged dependent regressor the rho map can contract slowly.
            max_iter: 1_000,
            rho_tol: 1e-8,
        }
    }
}

/// First-order autocorrelation of residuals, by regression through the origin.
fn ar1_coefficient(e: &[f64]) -> f64 {
    let num: f64 = e.windows(2).map(|w| w[1] * w[0]).sum();
    let den: f64 = e[..e.len() - 1].iter().map(|v| v * v).sum();
    if den > 0.0 {
        (num / den).clamp(-RHO_BOUND, RHO_BOUND)
    } else {
        0.0
    }
}

/// Quasi-difference rows t >= 2 by rho and scale the first row by sqrt(1 - rho^2).
fn quasi_difference(y: &[f64], x: &DMatrix<f64>, rho: f64) -> (DVector<f64>, DMatrix<f64>) {
    let (n, k) = x.shape();
    let first = (1.0 - rho * rho).sqrt();
    let ys = DVector::from_fn(n, |t, _| if t == 0 { first * y[0] } else { y[t] - rho * y[t - 1] });
    let xs = DMatrix::from_fn(n, k, |t, j| {
        if t == 0 {
            first * x[(0, j)]
        } else {
            x[(t, j)] - rho * x[(t - 1, j)]
        }
    });
    (ys, xs)
}

/// Iterated Prais-Winsten FGLS with HC1 standard errors on the transformed system.
pub fn prais_winsten_fit(y: &[f64], design: &Design, opts: &PraisWinstenOptions) -> Result<RegressionResult> {
    let n = y.len();
    if n < MIN_PW_OBS {
        return Err(Error::TooShort {
            needed: MIN_PW_OBS,
            got: n,
        });
    }
    let x = &design.matrix;
    let yv = DVector::from_column_slice(y);
    let mut fit = least_squares(&yv, x)?;
    if opts.max_iter == 0 {
        let residuals = fit.residuals.as_slice().to_vec();
        return Ok(summarize(
            &fit,
            x,
            &design.names,
            CovarianceKind::Hc1,
            0.0,
            0,
            residuals,
        ));
    }

    let mut rho = 0.0;
    for iter in 1..=opts.max_iter {
        let e = &yv - x * &fit.coefficients;
        let rho_new = ar1_coefficient(e.as_slice());
        let (ys, xs) = quasi_difference(y, x, rho_new);
        fit = least_squares(&ys, &xs)?;
        let delta = (rho_new - rho).abs();
        rho = rho_new;
        if delta < opts.rho_tol {
            let residuals = (&yv - x * &fit.coefficients).as_slice().to_vec();
            return Ok(summarize(
                &fit,
                &xs,
                &design.names,
                CovarianceKind::Hc1,
                rho,
                iter,
                residuals,
            ));
        }
    }
    Err(Error::NoConvergence(format!(
        "Prais-Winsten rho still moving after {} iterations (last rho = {rho:.6})",
        opts.max_iter
    )))
}

pub const SAFE_HAVEN_COLUMNS: [&str; 5] = ["intercept", "asset_lag", "index", "covid_x_index", "index_lag"];
/// Name of the crisis-interaction coefficient.
pub const CRISIS_COEFFICIENT: &str = "covid_x_index";

/// Design for the crisis-dummy regression; the first observation is lost to the lags.
pub fn safe_haven_design(asset: &ReturnSeries, index: &ReturnSeries, dummy: &CovidDummy) -> Result<(Vec<f64>, Design)> {
    if asset.dates() != index.dates() || asset.dates() != dummy.dates.as_slice() {
        return Err(Error::DimensionMismatch(
            "asset, index and dummy must share the same dates".into(),
        ));
    }
    let (a, x, d) = (asset.values(), index.values(), &dummy.indicator);
    let n = a.len();
    if n < 2 {
        return Err(Error::TooShort { needed: 2, got: n });
    }
    let rows = n - 1;
    let m = DMatrix::from_fn(rows, 5, |r, c| {
        let t = r + 1;
        match c {
            0 => 1.0,
            1 => a[t - 1],
            2 => x[t],
            3 => d[t] * x[t],
            _ => x[t - 1],
        }
    });
    Ok((a[1..].to_vec(), Design::new(&SAFE_HAVEN_COLUMNS, m)?))
}

/// Prais-Winsten fit of the crisis-dummy regression for one aligned pair.
pub fn safe_haven_regression(
    asset: &ReturnSeries,
    index: &ReturnSeries,
    dummy: &CovidDummy,
    opts: &PraisWinstenOptions,
) -> Result<RegressionResult> {
    let (y, design) = safe_haven_design(asset, index, dummy)?;
    prais_winsten_fit(&y, &design, opts)
}
