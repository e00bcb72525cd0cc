//! Loading, return construction, calendar alignment and descriptive statistics.

use std::collections::HashSet;
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats;

/// Minimum number of common dates for a usable pair.
pub const MIN_OVERLAP: usize = 30;

/// Cell contents treated as a missing value. Rows holding one are dropped.
const MISSING_TOKENS: [&str; 6] = ["", "na", "nan", "null", "n/a", "."];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ValueKind {
    Price,
    Return,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesSchema {
    pub date_column: String,
    pub value_column: String,
    pub value_kind: ValueKind,
}

impl SeriesSchema {
    pub fn new(date_column: &str, value_column: &str, value_kind: ValueKind) -> Self {
        Self {
            date_column: date_column.to_string(),
            value_column: value_column.to_string(),
            value_kind,
        }
    }
}

fn check_increasing(dates: &[NaiveDate]) -> Result<()> {
    for w in dates.windows(2) {
        if w[1] == w[0] {
            return Err(Error::DuplicateDate(w[1]));
        }
        if w[1] < w[0] {
            return Err(Error::InvalidParams(format!(
                "dates not increasing: {} follows {}",
                w[1], w[0]
            )));
        }
    }
    Ok(())
}

/// Date-indexed price levels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriceSeries {
    asset_id: String,
    dates: Vec<NaiveDate>,
    prices: Vec<f64>,
}

impl PriceSeries {
    pub fn new(asset_id: impl Into<String>, dates: Vec<NaiveDate>, prices: Vec<f64>) -> Result<Self> {
        if dates.len() != prices.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} dates for {} prices",
                dates.len(),
                prices.len()
            )));
        }
        if prices.len() < 2 {
            return Err(Error::TooShort {
                needed: 2,
                got: prices.len(),
            });
        }
        check_increasing(&dates)?;
        for (d, &p) in dates.iter().zip(&prices) {
            if !(p > 0.0 && p.is_finite()) {
                return Err(Error::NonPositivePrice { date: *d, price: p });
            }
        }
        Ok(Self {
            asset_id: asset_id.into(),
            dates,
            prices,
        })
    }

    pub fn asset_id(&self) -> &str {
        &self.asset_id
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn prices(&self) -> &[f64] {
        &self.prices
    }

    pub fn len(&self) -> usize {
        self.prices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prices.is_empty()
    }
}

/// Date-indexed daily log returns, in percent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReturnSeries {
    asset_id: String,
    dates: Vec<NaiveDate>,
    values: Vec<f64>,
}

impl ReturnSeries {
    pub fn new(asset_id: impl Into<String>, dates: Vec<NaiveDate>, values: Vec<f64>) -> Result<Self> {
        if dates.len() != values.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} dates for {} returns",
                dates.len(),
                values.len()
            )));
        }
        check_increasing(&dates)?;
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("return series".into()));
        }
        Ok(Self {
            asset_id: asset_id.into(),
            dates,
            values,
        })
    }

    /// Series on consecutive weekdays starting at `start`, for simulated data.
    pub fn on_business_days(asset_id: impl Into<String>, start: NaiveDate, values: Vec<f64>) -> Self {
        let dates = business_days(start, values.len());
        Self::new(asset_id, dates, values).expect("generated dates are increasing")
    }

    pub fn asset_id(&self) -> &str {
        &self.asset_id
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn with_id(mut self, asset_id: impl Into<String>) -> Self {
        self.asset_id = asset_id.into();
        self
    }

    /// Observations with `start <= date <= end`.
    pub fn restrict(&self, start: NaiveDate, end: NaiveDate) -> ReturnSeries {
        let (dates, values) = self
            .dates
            .iter()
            .zip(&self.values)
            .filter(|(d, _)| **d >= start && **d <= end)
            .map(|(d, v)| (*d, *v))
            .unzip();
        ReturnSeries {
            asset_id: self.asset_id.clone(),
            dates,
            values,
        }
    }

    /// Multiply every return by `c`.
    pub fn scaled(&self, c: f64) -> ReturnSeries {
        ReturnSeries {
            asset_id: self.asset_id.clone(),
            dates: self.dates.clone(),
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }
}

/// `n` consecutive Monday-to-Friday dates starting at the first weekday on or after `start`.
pub fn business_days(start: NaiveDate, n: usize) -> Vec<NaiveDate> {
    use chrono::Datelike;
    start
        .iter_days()
        .filter(|d| d.weekday().number_from_monday() <= 5)
        .take(n)
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub enum LoadedSeries {
    Prices(PriceSeries),
    Returns(ReturnSeries),
}

impl LoadedSeries {
    /// Percent log returns, computing them from prices when needed.
    pub fn into_returns(self) -> Result<ReturnSeries> {
        match self {
            LoadedSeries::Prices(p) => log_returns(&p),
            LoadedSeries::Returns(r) => Ok(r),
        }
    }
}

fn is_missing(cell: &str) -> bool {
    let c = cell.trim().to_ascii_lowercase();
    MISSING_TOKENS.contains(&c.as_str())
}

/// Read one series from a CSV file with a header row.
///
/// Rows whose value cell is empty or a missing-value token are dropped. Rows are sorted by
/// date; repeated dates are an error.
pub fn load_series(path: impl AsRef<Path>, asset_id: &str, schema: &SeriesSchema) -> Result<LoadedSeries> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_series(file, asset_id, schema)
}

/// [`load_series`] over any reader.
pub fn read_series<R: std::io::Read>(reader: R, asset_id: &str, schema: &SeriesSchema) -> Result<LoadedSeries> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .comment(Some(b'#'))
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::Config(format!("column '{name}' not found in header")))
    };
    let date_idx = find(&schema.date_column)?;
    let value_idx = find(&schema.value_column)?;

    let mut rows: Vec<(NaiveDate, f64, usize)> = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let malformed = |reason: String| Error::MalformedRow { line, reason };
        let date_cell = record
            .get(date_idx)
            .ok_or_else(|| malformed("missing date cell".into()))?;
        let value_cell = record.get(value_idx).unwrap_or("");
        if is_missing(value_cell) {
            continue;
        }
        let date = NaiveDate::parse_from_str(date_cell.trim(), "%Y-%m-%d")
            .map_err(|e| malformed(format!("bad date '{date_cell}': {e}")))?;
        let value: f64 = value_cell
            .trim()
            .parse()
            .map_err(|_| malformed(format!("bad number '{value_cell}'")))?;
        if !value.is_finite() {
            return Err(malformed(format!("non-finite value '{value_cell}'")));
        }
        rows.push((date, value, line));
    }

    rows.sort_by_key(|r| r.0);
    for w in rows.windows(2) {
        if w[0].0 == w[1].0 {
            return Err(Error::DuplicateDate(w[1].0));
        }
    }
    let (dates, values): (Vec<_>, Vec<_>) = rows.iter().map(|r| (r.0, r.1)).unzip();

    match schema.value_kind {
        ValueKind::Price => Ok(LoadedSeries::Prices(PriceSeries::new(asset_id, dates, values)?)),
        ValueKind::Return => Ok(LoadedSeries::Returns(ReturnSeries::new(asset_id, dates, values)?)),
    }
}

/// 100 * ln(p_t / p_{t-1}), dated at t.
pub fn log_returns(p: &PriceSeries) -> Result<ReturnSeries> {
    if p.len() < 2 {
        return Err(Error::TooShort {
            needed: 2,
            got: p.len(),
        });
    }
    let values = p.prices.windows(2).map(|w| 100.0 * (w[1] / w[0]).ln()).collect();
    ReturnSeries::new(p.asset_id.clone(), p.dates[1..].to_vec(), values)
}

/// An asset and an index restricted to their common dates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlignedPair {
    pub asset: ReturnSeries,
    pub index: ReturnSeries,
}

impl AlignedPair {
    pub fn common_dates(&self) -> &[NaiveDate] {
        self.asset.dates()
    }

    pub fn len(&self) -> usize {
        self.asset.len()
    }

    pub fn is_empty(&self) -> bool {
        self.asset.is_empty()
    }
}

fn intersect(a: &ReturnSeries, b: &ReturnSeries) -> (ReturnSeries, ReturnSeries) {
    let in_b: HashSet<NaiveDate> = b.dates.iter().copied().collect();
    let keep: HashSet<NaiveDate> = a.dates.iter().copied().filter(|d| in_b.contains(d)).collect();
    let pick = |s: &ReturnSeries| {
        let (dates, values) = s
            .dates
            .iter()
            .zip(&s.values)
            .filter(|(d, _)| keep.contains(d))
            .map(|(d, v)| (*d, *v))
            .unzip();
        ReturnSeries {
            asset_id: s.asset_id.clone(),
            dates,
            values,
        }
    };
    (pick(a), pick(b))
}

/// Restrict both series to the dates present in both.
pub fn align(asset: &ReturnSeries, index: &ReturnSeries) -> Result<AlignedPair> {
    if asset.is_empty() || index.is_empty() {
        return Err(Error::InsufficientOverlap {
            common: 0,
            required: MIN_OVERLAP,
        });
    }
    let (a, b) = intersect(asset, index);
    if a.len() < MIN_OVERLAP {
        return Err(Error::InsufficientOverlap {
            common: a.len(),
            required: MIN_OVERLAP,
        });
    }
    Ok(AlignedPair { asset: a, index: b })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DescriptiveStats {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    pub std_dev: f64,
    pub n_obs: usize,
}

pub fn describe(r: &ReturnSeries) -> Result<DescriptiveStats> {
    let x = r.values();
    if x.len() < 2 {
        return Err(Error::TooShort {
            needed: 2,
            got: x.len(),
        });
    }
    let mean = stats::mean(x);
    let min = x.iter().copied().fold(f64::INFINITY, f64::min);
    let max = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let std_dev = stats::sample_variance(x).max(0.0).sqrt();
    Ok(DescriptiveStats {
        // Summation rounding can put the mean of a constant series a hair outside [min, max].
        mean: mean.clamp(min, max),
        min,
        max,
        std_dev,
        n_obs: x.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    pub labels: Vec<String>,
    pub values: Vec<Vec<f64>>,
}

/// Pairwise Pearson correlations, each pair on its own common dates.
pub fn static_correlation_matrix(series: &[ReturnSeries]) -> Result<CorrelationMatrix> {
    let n = series.len();
    if n < 2 {
        return Err(Error::TooShort { needed: 2, got: n });
    }
    let mut values = vec![vec![0.0; n]; n];
    for i in 0..n {
        values[i][i] = 1.0;
        for j in (i + 1)..n {
            let pair = align(&series[i], &series[j])?;
            let rho = stats::pearson(pair.asset.values(), pair.index.values()).ok_or_else(|| {
                Error::DegenerateSeries(format!(
                    "zero variance in {} or {} over common dates",
                    series[i].asset_id(),
                    series[j].asset_id()
                ))
            })?;
            values[i][j] = rho;
            values[j][i] = rho;
        }
    }
    Ok(CorrelationMatrix {
        labels: series.iter().map(|s| s.asset_id().to_string()).collect(),
        values,
    })
}
