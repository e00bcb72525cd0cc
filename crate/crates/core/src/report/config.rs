use std::collections::HashSet;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::classify::ClassifyConfig;
use crate::diagnostics::DEFAULT_ARCH_LAGS;
use crate::error::{Error, Result};
use crate::garch::FitOptions;
use crate::ingest::{SeriesSchema, ValueKind};
use crate::regression::{default_announcement, DayMode, PraisWinstenOptions, DEFAULT_HORIZON};
use crate::stationarity::{BandwidthPolicy, Deterministic, LagPolicy};

/// Environment variable that overrides `output.dir`.
pub const OUTPUT_DIR_ENV: &str = "SAFEHAVEN_OUTPUT_DIR";

fn default_date_column() -> String {
    "date".into()
}

fn default_value_column() -> String {
    "close".into()
}

fn default_kind() -> ValueKind {
    ValueKind::Price
}

/// One input file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesEntry {
    pub id: String,
    pub path: PathBuf,
    #[serde(default = "default_date_column")]
    pub date_column: String,
    #[serde(default = "default_value_column")]
    pub value_column: String,
    #[serde(default = "default_kind")]
    pub kind: ValueKind,
}

impl SeriesEntry {
    pub fn new(id: &str, path: impl Into<PathBuf>) -> Self {
        Self {
            id: id.into(),
            path: path.into(),
            date_column: default_date_column(),
            value_column: default_value_column(),
            kind: default_kind(),
        }
    }

    pub fn schema(&self) -> SeriesSchema {
        SeriesSchema::new(&self.date_column, &self.value_column, self.kind)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SampleConfig {
    pub start: NaiveDate,
    pub end: NaiveDate,
}

impl Default for SampleConfig {
    fn default() -> Self {
        Self {
            start: NaiveDate::from_ymd_opt(2020, 1, 2).expect("valid date"),
            end: NaiveDate::from_ymd_opt(2020, 6, 30).expect("valid date"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CrisisConfig {
    pub announcement: NaiveDate,
    pub horizon: usize,
    pub day_mode: DayMode,
}

impl Default for CrisisConfig {
    fn default() -> Self {
        Self {
            announcement: default_announcement(),
            horizon: DEFAULT_HORIZON,
            day_mode: DayMode::TradingDays,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TestConfig {
    pub deterministic: Deterministic,
    pub adf_lags: LagPolicy,
    pub pp_bandwidth: BandwidthPolicy,
    pub arch_lags: usize,
}

impl Default for TestConfig {
    fn default() -> Self {
        Self {
            deterministic: Deterministic::Constant,
            adf_lags: LagPolicy::AicSchwert,
            pp_bandwidth: BandwidthPolicy::NeweyWestAuto,
            arch_lags: DEFAULT_ARCH_LAGS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    /// Stamp reports with a constant time so repeated runs are byte-identical.
    pub fixed_clock: bool,
    /// Also write the GARCH conditional variance paths.
    pub export_variance_paths: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("output"),
            fixed_clock: true,
            export_variance_paths: false,
        }
    }
}

/// Everything a run needs. Read from TOML; every section except the series lists is optional.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    #[serde(default)]
    pub assets: Vec<SeriesEntry>,
    #[serde(default)]
    pub indices: Vec<SeriesEntry>,
    #[serde(default)]
    pub sample: SampleConfig,
    #[serde(default)]
    pub crisis: CrisisConfig,
    #[serde(default)]
    pub tests: TestConfig,
    #[serde(default)]
    pub optimizer: FitOptions,
    #[serde(default)]
    pub prais_winsten: PraisWinstenOptions,
    #[serde(default)]
    pub classify: ClassifyConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

impl PipelineConfig {
    pub fn new(assets: Vec<SeriesEntry>, indices: Vec<SeriesEntry>) -> Self {
        Self {
            assets,
            indices,
            sample: SampleConfig::default(),
            crisis: CrisisConfig::default(),
            tests: TestConfig::default(),
            optimizer: FitOptions::default(),
            prais_winsten: PraisWinstenOptions::default(),
            classify: ClassifyConfig::default(),
            output: OutputConfig::default(),
        }
    }

    /// Parse TOML. Relative paths are resolved against `base_dir`.
    pub fn from_toml_str(text: &str, base_dir: &Path) -> Result<Self> {
        let mut cfg: PipelineConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        for entry in cfg.assets.iter_mut().chain(cfg.indices.iter_mut()) {
            if entry.path.is_relative() {
                entry.path = base_dir.join(&entry.path);
            }
        }
        if cfg.output.dir.is_relative() {
            cfg.output.dir = base_dir.join(&cfg.output.dir);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Read and validate a config file.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::from_toml_str(&text, base)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.assets.is_empty() || self.indices.is_empty() {
            return Err(Error::Config("at least one asset and one index are required".into()));
        }
        let mut seen = HashSet::new();
        for entry in self.assets.iter().chain(&self.indices) {
            if entry.id.trim().is_empty() {
                return Err(Error::Config("series id must not be empty".into()));
            }
            if !seen.insert(entry.id.as_str()) {
                return Err(Error::Config(format!("duplicate series id '{}'", entry.id)));
            }
            if !entry.path.is_file() {
                return Err(Error::Config(format!(
                    "data file for '{}' not found: {}",
                    entry.id,
                    entry.path.display()
                )));
            }
        }
        if self.sample.start >= self.sample.end {
            return Err(Error::Config(format!(
                "sample start {} is not before end {}",
                self.sample.start, self.sample.end
            )));
        }
        let c = &self.classify;
        if !(c.significance > 0.0 && c.significance < 1.0) || c.diversifier_cap < c.hedge_max_rho {
            return Err(Error::Config(format!("invalid classification thresholds {c:?}")));
        }
        Ok(())
    }

    /// `output.dir`, unless overridden by [`OUTPUT_DIR_ENV`].
    pub fn resolved_output_dir(&self) -> PathBuf {
        match std::env::var_os(OUTPUT_DIR_ENV) {
            Some(dir) if !dir.is_empty() => PathBuf::from(dir),
            _ => self.output.dir.clone(),
        }
    }

    /// All (asset, index) pairs in configuration order.
    pub fn pairs(&self) -> Vec<(&SeriesEntry, &SeriesEntry)> {
        self.assets
            .iter()
            .flat_map(|a| self.indices.iter().map(move |i| (a, i)))
            .collect()
    }
}
