//! Small statistical helpers shared across the test and estimation modules.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

/// Conventional significance levels, strongest first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Significance {
    #[serde(rename = "1%")]
    OnePercent,
    #[serde(rename = "5%")]
    FivePercent,
    #[serde(rename = "10%")]
    TenPercent,
}

impl Significance {
    pub const ALL: [Significance; 3] = [
        Significance::OnePercent,
        Significance::FivePercent,
        Significance::TenPercent,
    ];

    pub fn level(self) -> f64 {
        match self {
            Significance::OnePercent => 0.01,
            Significance::FivePercent => 0.05,
            Significance::TenPercent => 0.10,
        }
    }

    pub fn stars(self) -> &'static str {
        match self {
            Significance::OnePercent => "***",
            Significance::FivePercent => "**",
            Significance::TenPercent => "*",
        }
    }

    /// Strongest level at which a p-value is significant.
    pub fn from_p_value(p: f64) -> Option<Significance> {
        Self::ALL.into_iter().find(|s| p < s.level())
    }
}

/// Star annotation for a p-value: `***` below 1%, `**` below 5%, `*` below 10%.
pub fn stars(p: f64) -> &'static str {
    Significance::from_p_value(p).map_or("", Significance::stars)
}

pub fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Sample variance with the n-1 denominator.
pub fn sample_variance(x: &[f64]) -> f64 {
    let m = mean(x);
    x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (x.len() as f64 - 1.0)
}

/// Variance around the sample mean with the n denominator.
pub fn population_variance(x: &[f64]) -> f64 {
    let m = mean(x);
    x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / x.len() as f64
}

/// Pearson correlation. Returns `None` when either input has zero variance.
///
/// Identical inputs give exactly 1 and negated inputs exactly -1.
pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    assert_eq!(x.len(), y.len(), "pearson: length mismatch");
    let mx = mean(x);
    let my = mean(y);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (da, db) = (a - mx, b - my);
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Upper-tail probability of a chi-square(df) variate.
pub fn chi2_sf(statistic: f64, df: usize) -> f64 {
    if statistic <= 0.0 {
        return 1.0;
    }
    let dist = ChiSquared::new(df as f64).expect("df > 0");
    dist.sf(statistic).clamp(0.0, 1.0)
}

/// Two-sided p-value of a t-ratio against the standard normal.
pub fn normal_two_sided_p(t: f64) -> f64 {
    let n = Normal::standard();
    (2.0 * n.sf(t.abs())).clamp(0.0, 1.0)
}

pub fn normal_cdf(x: f64) -> f64 {
    Normal::standard().cdf(x)
}

/// Sample kurtosis (not excess), moment estimator.
pub fn kurtosis(x: &[f64]) -> f64 {
    let m = mean(x);
    let n = x.len() as f64;
    let m2 = x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / n;
    let m4 = x.iter().map(|v| (v - m).powi(4)).sum::<f64>() / n;
    m4 / (m2 * m2)
}
