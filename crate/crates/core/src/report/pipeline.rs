use chrono::{NaiveDate, SecondsFormat, Utc};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{PipelineConfig, SeriesEntry, TestConfig};
use crate::classify::{classify_grid, classify_pair, Verdict, VerdictSummary};
use crate::dcc::{fit_dcc, CorrelationPath, DccFit, DccParams};
use crate::diagnostics::{arch_lm_test, breusch_pagan_test, demean, trend_design, LmTestResult};
use crate::error::{Error, Result};
use crate::garch::{fit_garch11, GarchFit, GarchParams};
use crate::ingest::{
    align, describe, load_series, static_correlation_matrix, CorrelationMatrix, DescriptiveStats, ReturnSeries,
};
use crate::regression::{build_covid_dummy, safe_haven_regression, RegressionResult};
use crate::stationarity::{adf_test, pp_test, UnitRootResult};

const FIXED_CLOCK: &str = "1970-01-01T00:00:00Z";

/// A computed value or the reason it could not be computed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome<T> {
    Ok(T),
    Error(String),
}

impl<T> Outcome<T> {
    pub fn ok(&self) -> Option<&T> {
        match self {
            Outcome::Ok(v) => Some(v),
            Outcome::Error(_) => None,
        }
    }

    pub fn error(&self) -> Option<&str> {
        match self {
            Outcome::Ok(_) => None,
            Outcome::Error(e) => Some(e),
        }
    }
}

impl<T> From<Result<T>> for Outcome<T> {
    fn from(r: Result<T>) -> Self {
        match r {
            Ok(v) => Outcome::Ok(v),
            Err(e) => Outcome::Error(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesRole {
    Asset,
    Index,
}

/// Per-series pre-estimation tests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesTests {
    pub descriptive: Outcome<DescriptiveStats>,
    pub adf: Outcome<UnitRootResult>,
    pub pp: Outcome<UnitRootResult>,
    pub arch_lm: Outcome<LmTestResult>,
    pub breusch_pagan: Outcome<LmTestResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesReport {
    pub id: String,
    pub role: SeriesRole,
    pub tests: Outcome<SeriesTests>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GarchSummary {
    pub params: GarchParams,
    pub persistence: f64,
    pub loglik: f64,
    pub converged: bool,
    pub iterations: usize,
    pub n_obs: usize,
}

impl From<&GarchFit> for GarchSummary {
    fn from(f: &GarchFit) -> Self {
        Self {
            params: f.params,
            persistence: f.params.persistence(),
            loglik: f.loglik,
            converged: f.converged,
            iterations: f.iterations,
            n_obs: f.h.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DccSummary {
    pub params: DccParams,
    pub q_bar_12: f64,
    pub loglik: f64,
    pub converged: bool,
    pub degenerate: bool,
    pub clamp_events: usize,
    pub iterations: usize,
    pub full_mean_rho: Option<f64>,
    pub crisis_mean_rho: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairResult {
    pub n_obs: usize,
    pub first_date: NaiveDate,
    pub last_date: NaiveDate,
    pub garch_asset: GarchSummary,
    pub garch_index: GarchSummary,
    pub dcc: DccSummary,
    pub crisis_window: (NaiveDate, NaiveDate),
    pub crisis_observations: usize,
    pub crisis_window_partial: bool,
    pub regression: RegressionResult,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairEntry {
    pub asset_id: String,
    pub index_id: String,
    pub outcome: Outcome<PairResult>,
}

/// Conditional variance path of one series within one pair.
#[derive(Debug, Clone, PartialEq)]
pub struct VariancePath {
    pub asset_id: String,
    pub index_id: String,
    pub series_id: String,
    pub dates: Vec<NaiveDate>,
    pub h: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub tool: String,
    pub version: String,
    pub generated_at: String,
    pub seed: u64,
    /// Modelling choices that the output depends on.
    pub conventions: Vec<String>,
    pub config: PipelineConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub metadata: RunMetadata,
    pub series: Vec<SeriesReport>,
    pub correlation_matrix: Outcome<CorrelationMatrix>,
    /// Every configured pair exactly once, in configuration order.
    pub pairs: Vec<PairEntry>,
    /// Configured assets by configured indices; failed pairs leave an empty cell.
    pub verdicts: VerdictSummary,
    /// DCC paths of the successful pairs; exported as CSV, not serialized.
    #[serde(skip)]
    pub correlation_paths: Vec<CorrelationPath>,
    #[serde(skip)]
    pub variance_paths: Vec<VariancePath>,
}

impl Report {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn succeeded(&self) -> usize {
        self.pairs.iter().filter(|p| p.outcome.ok().is_some()).count()
    }

    pub fn pair(&self, asset: &str, index: &str) -> Option<&PairEntry> {
        self.pairs.iter().find(|p| p.asset_id == asset && p.index_id == index)
    }
}

/// Unit-root and heteroskedasticity tests plus descriptive statistics for one return series.
pub fn series_tests(r: &ReturnSeries, opts: &TestConfig) -> SeriesTests {
    let demeaned = demean(r.values());
    SeriesTests {
        descriptive: describe(r).into(),
        adf: adf_test(r, opts.deterministic, opts.adf_lags).into(),
        pp: pp_test(r, opts.deterministic, opts.pp_bandwidth).into(),
        arch_lm: arch_lm_test(&demeaned, opts.arch_lags).into(),
        breusch_pagan: breusch_pagan_test(&demeaned, &trend_design(demeaned.len())).into(),
    }
}

fn load_returns(entry: &SeriesEntry, cfg: &PipelineConfig) -> Result<ReturnSeries> {
    let loaded = load_series(&entry.path, &entry.id, &entry.schema())?;
    let r = loaded.into_returns()?.restrict(cfg.sample.start, cfg.sample.end);
    if r.len() < 2 {
        return Err(Error::TooShort {
            needed: 2,
            got: r.len(),
        });
    }
    Ok(r)
}

struct PairOutput {
    result: PairResult,
    path: CorrelationPath,
    variances: [VariancePath; 2],
}

fn run_pair(asset: &ReturnSeries, index: &ReturnSeries, cfg: &PipelineConfig) -> Result<PairOutput> {
    let pair = align(asset, index)?;
    let ga = fit_garch11(&pair.asset, &cfg.optimizer)?;
    let gi = fit_garch11(&pair.index, &cfg.optimizer)?;
    let dcc: DccFit = fit_dcc(&pair, &ga, &gi, &cfg.optimizer)?;
    let dummy = build_covid_dummy(
        pair.common_dates(),
        cfg.crisis.announcement,
        cfg.crisis.horizon,
        cfg.crisis.day_mode,
    )?;
    let regression = safe_haven_regression(&pair.asset, &pair.index, &dummy, &cfg.prais_winsten)?;
    let window = dummy.window();
    let verdict = classify_pair(&dcc.rho_path, &regression, window, &cfg.classify)?;
    let dates = pair.common_dates().to_vec();
    let variance = |series: &ReturnSeries, fit: &GarchFit| VariancePath {
        asset_id: asset.asset_id().to_string(),
        index_id: index.asset_id().to_string(),
        series_id: series.asset_id().to_string(),
        dates: dates.clone(),
        h: fit.h.clone(),
    };
    Ok(PairOutput {
        variances: [variance(&pair.asset, &ga), variance(&pair.index, &gi)],
        result: PairResult {
            n_obs: pair.len(),
            first_date: dates[0],
            last_date: dates[dates.len() - 1],
            garch_asset: (&ga).into(),
            garch_index: (&gi).into(),
            dcc: DccSummary {
                params: dcc.params,
                q_bar_12: dcc.q_bar.q12,
                loglik: dcc.loglik,
                converged: dcc.converged,
                degenerate: dcc.degenerate,
                clamp_events: dcc.clamp_events,
                iterations: dcc.iterations,
                full_mean_rho: verdict.evidence.full_mean_rho,
                crisis_mean_rho: verdict.evidence.crisis_mean_rho,
            },
            crisis_window: window,
            crisis_observations: dummy.active_count(),
            crisis_window_partial: dummy.partial,
            regression,
            verdict,
        },
        path: dcc.rho_path,
    })
}

fn conventions(cfg: &PipelineConfig) -> Vec<String> {
    vec![
        "returns: 100 * log price ratio".into(),
        "alignment: intersection of observed dates per pair".into(),
        "garch: Gaussian QMLE, variance recursion started from the sample variance".into(),
        "dcc: correlation targeting, Q_1 = Qbar".into(),
        format!(
            "crisis dummy: {:?}, {} observations after {}",
            cfg.crisis.day_mode, cfg.crisis.horizon, cfg.crisis.announcement
        ),
        "regression: iterated Prais-Winsten, HC1 standard errors, normal p-values".into(),
        format!(
            "classification: significance {}, hedge if mean rho <= {}, diversifier if mean rho <= {}",
            cfg.classify.significance, cfg.classify.hedge_max_rho, cfg.classify.diversifier_cap
        ),
    ]
}

/// Run every stage on the configured data. Pair failures are recorded in the report; the run
/// fails only for an invalid configuration or when no pair succeeds.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<Report> {
    cfg.validate()?;

    let entries: Vec<(&SeriesEntry, SeriesRole)> = cfg
        .assets
        .iter()
        .map(|e| (e, SeriesRole::Asset))
        .chain(cfg.indices.iter().map(|e| (e, SeriesRole::Index)))
        .collect();
    let loaded: Vec<Result<ReturnSeries>> = entries.par_iter().map(|(e, _)| load_returns(e, cfg)).collect();

    let series: Vec<SeriesReport> = entries
        .par_iter()
        .zip(&loaded)
        .map(|((e, role), r)| SeriesReport {
            id: e.id.clone(),
            role: *role,
            tests: match r {
                Ok(r) => Outcome::Ok(series_tests(r, &cfg.tests)),
                Err(err) => Outcome::Error(err.to_string()),
            },
        })
        .collect();

    let ok_series: Vec<ReturnSeries> = loaded.iter().filter_map(|r| r.as_ref().ok().cloned()).collect();
    let correlation_matrix = static_correlation_matrix(&ok_series).into();

    let lookup = |id: &str| -> std::result::Result<&ReturnSeries, String> {
        let k = entries.iter().position(|(e, _)| e.id == id).expect("configured id");
        loaded[k]
            .as_ref()
            .map_err(|e| format!("series '{id}' unavailable: {e}"))
    };
    let pairs = cfg.pairs();
    let outputs: Vec<std::result::Result<PairOutput, String>> = pairs
        .par_iter()
        .map(|(a, i)| {
            let (ra, ri) = (lookup(&a.id)?, lookup(&i.id)?);
            run_pair(ra, ri, cfg).map_err(|e| e.to_string())
        })
        .collect();

    let mut pair_entries = Vec::with_capacity(pairs.len());
    let mut correlation_paths = Vec::new();
    let mut variance_paths = Vec::new();
    let mut verdicts = Vec::new();
    for ((a, i), out) in pairs.iter().zip(outputs) {
        let outcome = match out {
            Ok(o) => {
                verdicts.push(o.result.verdict.clone());
                correlation_paths.push(o.path);
                if cfg.output.export_variance_paths {
                    variance_paths.extend(o.variances);
                }
                Outcome::Ok(o.result)
            }
            Err(e) => Outcome::Error(e),
        };
        pair_entries.push(PairEntry {
            asset_id: a.id.clone(),
            index_id: i.id.clone(),
            outcome,
        });
    }

    if verdicts.is_empty() {
        let first = pair_entries
            .iter()
            .find_map(|p| p.outcome.error().map(|e| format!("{}/{}: {e}", p.asset_id, p.index_id)))
            .unwrap_or_default();
        return Err(Error::AllPairsFailed {
            attempted: pair_entries.len(),
            first,
        });
    }

    let generated_at = if cfg.output.fixed_clock {
        FIXED_CLOCK.to_string()
    } else {
        Utc::now().to_rfc3339_opts(SecondsFormat::Secs, true)
    };
    Ok(Report {
        metadata: RunMetadata {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            generated_at,
            seed: cfg.optimizer.seed,
            conventions: conventions(cfg),
            config: cfg.clone(),
        },
        series,
        correlation_matrix,
        pairs: pair_entries,
        verdicts: classify_grid(
            cfg.assets.iter().map(|e| e.id.clone()).collect(),
            cfg.indices.iter().map(|e| e.id.clone()).collect(),
            &verdicts,
        ),
        correlation_paths,
        variance_paths,
    })
}
