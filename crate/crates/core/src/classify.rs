//! Safe-haven / hedge / diversifier labelling of (asset, index) pairs.
//!
//! Decision rule, applied in order:
//!
//! 1. **SafeHaven** if the crisis coefficient is negative and either significant at the
//!    configured level or accompanied by a negative mean DCC correlation inside the crisis window.
//! 2. **Hedge** if the full-sample mean correlation is at most `hedge_max_rho`.
//! 3. **Diversifier** if the full-sample mean correlation lies in `(hedge_max_rho, diversifier_cap]`.
//! 4. **None** otherwise, including when no correlation evidence is available.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::dcc::CorrelationPath;
use crate::error::{Error, Result};
use crate::regression::{RegressionResult, CRISIS_COEFFICIENT};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Label {
    SafeHaven,
    Hedge,
    Diversifier,
    None,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::SafeHaven => "SafeHaven",
            Label::Hedge => "Hedge",
            Label::Diversifier => "Diversifier",
            Label::None => "None",
        }
    }
}

impl std::fmt::Display for Label {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ClassifyConfig {
    /// Full-sample mean correlation at or below which a pair is a hedge.
    pub hedge_max_rho: f64,
    /// Upper bound on the full-sample mean correlation of a diversifier.
    pub diversifier_cap: f64,
    /// p-value at or below which the crisis coefficient counts as significant.
    pub significance: f64,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        Self {
            hedge_max_rho: 0.0,
            diversifier_cap: 0.5,
            significance: 0.10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Evidence {
    pub beta3: f64,
    pub beta3_p_value: f64,
    pub beta3_significant_negative: bool,
    pub crisis_mean_rho: Option<f64>,
    pub full_mean_rho: Option<f64>,
}

impl Evidence {
    pub fn new(
        beta3: f64,
        beta3_p_value: f64,
        crisis_mean_rho: Option<f64>,
        full_mean_rho: Option<f64>,
        cfg: &ClassifyConfig,
    ) -> Self {
        Self {
            beta3,
            beta3_p_value,
            beta3_significant_negative: beta3 < 0.0 && beta3_p_value <= cfg.significance,
            crisis_mean_rho,
            full_mean_rho,
        }
    }
}

/// The decision rule on its own.
pub fn label_from_evidence(e: &Evidence, cfg: &ClassifyConfig) -> Label {
    let significant = e.beta3_p_value <= cfg.significance;
    let crisis_negative = e.crisis_mean_rho.is_some_and(|r| r < 0.0);
    if e.beta3 < 0.0 && (significant || crisis_negative) {
        return Label::SafeHaven;
    }
    match e.full_mean_rho {
        Some(r) if r <= cfg.hedge_max_rho => Label::Hedge,
        Some(r) if r <= cfg.diversifier_cap => Label::Diversifier,
        _ => Label::None,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub asset_id: String,
    pub index_id: String,
    pub label: Label,
    pub evidence: Evidence,
    pub crisis_window: (NaiveDate, NaiveDate),
    pub config: ClassifyConfig,
}

/// Label one pair from its DCC path and crisis regression.
pub fn classify_pair(
    rho: &CorrelationPath,
    reg: &RegressionResult,
    window: (NaiveDate, NaiveDate),
    cfg: &ClassifyConfig,
) -> Result<Verdict> {
    let (start, end) = window;
    let covered = match (rho.dates.first(), rho.dates.last()) {
        (Some(first), Some(last)) => start <= end && *first <= start && *last >= end,
        _ => false,
    };
    let crisis_mean = rho.mean_over(start, end).filter(|_| covered).ok_or_else(|| {
        Error::WindowOutOfRange(format!(
            "correlation path for {}/{} does not cover {start}..{end}",
            rho.asset_id, rho.index_id
        ))
    })?;
    let beta3 = reg
        .get(CRISIS_COEFFICIENT)
        .ok_or_else(|| Error::InvalidDesign(format!("regression has no '{CRISIS_COEFFICIENT}' coefficient")))?;
    let evidence = Evidence::new(beta3.estimate, beta3.p_value, Some(crisis_mean), rho.mean(), cfg);
    Ok(Verdict {
        asset_id: rho.asset_id.clone(),
        index_id: rho.index_id.clone(),
        label: label_from_evidence(&evidence, cfg),
        evidence,
        crisis_window: window,
        config: *cfg,
    })
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelCounts {
    pub asset_id: String,
    pub safe_haven: usize,
    pub hedge: usize,
    pub diversifier: usize,
    pub none: usize,
    pub total: usize,
}

impl LabelCounts {
    fn add(&mut self, label: Label) {
        match label {
            Label::SafeHaven => self.safe_haven += 1,
            Label::Hedge => self.hedge += 1,
            Label::Diversifier => self.diversifier += 1,
            Label::None => self.none += 1,
        }
        self.total += 1;
    }
}

/// Asset-by-index label grid with per-asset counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictSummary {
    pub assets: Vec<String>,
    pub indices: Vec<String>,
    /// `labels[asset][index]`, `None` where the pair has no verdict.
    pub labels: Vec<Vec<Option<Label>>>,
    pub counts: Vec<LabelCounts>,
}

impl VerdictSummary {
    pub fn label(&self, asset: &str, index: &str) -> Option<Label> {
        let i = self.assets.iter().position(|a| a == asset)?;
        let j = self.indices.iter().position(|x| x == index)?;
        self.labels[i][j]
    }

    pub fn counts_for(&self, asset: &str) -> Option<&LabelCounts> {
        self.counts.iter().find(|c| c.asset_id == asset)
    }
}

/// Arrange verdicts into a grid, assets and indices in order of first appearance.
pub fn classify_all(verdicts: &[Verdict]) -> VerdictSummary {
    let mut assets: Vec<String> = Vec::new();
    let mut indices: Vec<String> = Vec::new();
    for v in verdicts {
        if !assets.contains(&v.asset_id) {
            assets.push(v.asset_id.clone());
        }
        if !indices.contains(&v.index_id) {
            indices.push(v.index_id.clone());
        }
    }
    classify_grid(assets, indices, verdicts)
}

/// Grid over fixed row and column orders. Cells without a verdict stay empty. Verdicts for
/// pairs outside the grid, and repeats of a pair, are ignored.
pub fn classify_grid(assets: Vec<String>, indices: Vec<String>, verdicts: &[Verdict]) -> VerdictSummary {
    let mut labels = vec![vec![None; indices.len()]; assets.len()];
    let mut counts: Vec<LabelCounts> = assets
        .iter()
        .map(|a| LabelCounts {
            asset_id: a.clone(),
            ..Default::default()
        })
        .collect();
    for v in verdicts {
        let i = assets.iter().position(|a| *a == v.asset_id);
        let j = indices.iter().position(|x| *x == v.index_id);
        if let (Some(i), Some(j)) = (i, j) {
            if labels[i][j].is_none() {
                labels[i][j] = Some(v.label);
                counts[i].add(v.label);
            }
        }
    }
    VerdictSummary {
        assets,
        indices,
        labels,
        counts,
    }
}
