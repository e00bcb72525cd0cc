//! Markdown and CSV renderings of a [`Report`].

use super::pipeline::{Outcome, Report, SeriesReport, SeriesRole};
use crate::regression::CRISIS_COEFFICIENT;
use crate::stats::stars;

pub const STAR_FOOTNOTE: &str = "*** significant at 1% level; ** at 5%; * at 10%.";
const NO_PAIRS: &str = "_no pairs_";
const MISSING: &str = "n/a";

/// A rendered output file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub file_name: String,
    pub content: String,
}

impl Document {
    fn new(file_name: &str, content: String) -> Self {
        Self {
            file_name: file_name.into(),
            content,
        }
    }
}

struct Table {
    title: String,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
    note: Option<String>,
}

impl Table {
    fn markdown(&self) -> String {
        let mut s = format!("## {}\n\n", self.title);
        if self.rows.is_empty() {
            s.push_str(NO_PAIRS);
            s.push('\n');
        } else {
            s.push_str(&format!("| {} |\n", self.header.join(" | ")));
            s.push_str(&format!("|{}\n", "---|".repeat(self.header.len())));
            for r in &self.rows {
                s.push_str(&format!("| {} |\n", r.join(" | ")));
            }
        }
        if let Some(note) = &self.note {
            s.push_str(&format!("\n{note}\n"));
        }
        s
    }

    fn csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        // Writing into memory cannot fail.
        let _ = w.write_record(&self.header);
        for r in &self.rows {
            let _ = w.write_record(r);
        }
        String::from_utf8(w.into_inner().unwrap_or_default()).unwrap_or_default()
    }
}

fn fmt(v: f64, digits: usize) -> String {
    if v.is_finite() {
        format!("{v:.digits$}")
    } else {
        MISSING.into()
    }
}

fn starred(v: f64, p: f64, digits: usize) -> String {
    format!("{}{}", fmt(v, digits), stars(p))
}

fn descriptive_table(title: &str, series: &[&SeriesReport]) -> Table {
    let header = std::iter::once(String::new())
        .chain(series.iter().map(|s| s.id.clone()))
        .collect();
    let stat = |f: &dyn Fn(&crate::ingest::DescriptiveStats) -> String| -> Vec<String> {
        series
            .iter()
            .map(|s| match &s.tests {
                Outcome::Ok(t) => t.descriptive.ok().map(f).unwrap_or_else(|| MISSING.into()),
                Outcome::Error(_) => MISSING.into(),
            })
            .collect()
    };
    let row = |name: &str, cells: Vec<String>| std::iter::once(name.to_string()).chain(cells).collect::<Vec<_>>();
    let rows = if series.is_empty() {
        Vec::new()
    } else {
        vec![
            row("Mean", stat(&|d| fmt(d.mean, 4))),
            row("Min", stat(&|d| fmt(d.min, 4))),
            row("Max", stat(&|d| fmt(d.max, 4))),
            row("Std. Dev.", stat(&|d| fmt(d.std_dev, 4))),
            row("Obs.", stat(&|d| d.n_obs.to_string())),
        ]
    };
    Table {
        title: title.into(),
        header,
        rows,
        note: Some("Returns in percent (100 x log price ratio).".into()),
    }
}

fn unit_root_table(series: &[SeriesReport]) -> Table {
    let rows = series
        .iter()
        .map(|s| {
            let mut row = vec![s.id.clone()];
            match &s.tests {
                Outcome::Ok(t) => {
                    for r in [&t.adf, &t.pp] {
                        match r {
                            Outcome::Ok(u) => {
                                let mark = u.reject_at.map(|l| l.stars()).unwrap_or("");
                                row.push(format!("{}{mark}", fmt(u.statistic, 3)));
                                row.push(u.lags.to_string());
                            }
                            Outcome::Error(_) => row.extend([MISSING.to_string(), MISSING.to_string()]),
                        }
                    }
                }
                Outcome::Error(_) => row.extend(std::iter::repeat_n(MISSING.to_string(), 4)),
            }
            row
        })
        .collect();
    Table {
        title: "Unit-root tests (null: unit root)".into(),
        header: ["Series", "ADF", "ADF lags", "PP", "PP bandwidth"]
            .map(String::from)
            .to_vec(),
        rows,
        note: Some(format!(
            "Stars mark rejection against MacKinnon critical values. {STAR_FOOTNOTE}"
        )),
    }
}

fn diagnostics_table(series: &[SeriesReport]) -> Table {
    let rows = series
        .iter()
        .map(|s| {
            let mut row = vec![s.id.clone()];
            match &s.tests {
                Outcome::Ok(t) => {
                    for r in [&t.arch_lm, &t.breusch_pagan] {
                        match r {
                            Outcome::Ok(lm) => {
                                row.push(starred(lm.statistic, lm.p_value, 3));
                                row.push(fmt(lm.p_value, 4));
                            }
                            Outcome::Error(_) => row.extend([MISSING.to_string(), MISSING.to_string()]),
                        }
                    }
                }
                Outcome::Error(_) => row.extend(std::iter::repeat_n(MISSING.to_string(), 4)),
            }
            row
        })
        .collect();
    Table {
        title: "ARCH-LM and Breusch-Pagan-Godfrey tests".into(),
        header: ["Series", "ARCH-LM", "p-value", "BPG", "p-value"]
            .map(String::from)
            .to_vec(),
        rows,
        note: Some(STAR_FOOTNOTE.into()),
    }
}

fn crisis_table(report: &Report) -> Table {
    let assets = &report.verdicts.assets;
    let indices = &report.verdicts.indices;
    let header = std::iter::once(String::new()).chain(assets.iter().cloned()).collect();
    let rows = if report.pairs.is_empty() {
        Vec::new()
    } else {
        indices
            .iter()
            .map(|i| {
                let mut row = vec![format!("COVID*{i}")];
                for a in assets {
                    let cell = report
                        .pair(a, i)
                        .and_then(|p| p.outcome.ok())
                        .and_then(|r| r.regression.get(CRISIS_COEFFICIENT))
                        .map(|c| starred(c.estimate, c.p_value, 3))
                        .unwrap_or_else(|| "error".into());
                    row.push(cell);
                }
                row
            })
            .collect()
    };
    Table {
        title: "Crisis interaction coefficient (Prais-Winsten, HC1)".into(),
        header,
        rows,
        note: Some(STAR_FOOTNOTE.into()),
    }
}

fn coefficient_table(report: &Report) -> Table {
    let mut rows = Vec::new();
    for p in &report.pairs {
        match &p.outcome {
            Outcome::Ok(r) => {
                for c in &r.regression.coefficients {
                    rows.push(vec![
                        p.asset_id.clone(),
                        p.index_id.clone(),
                        c.name.clone(),
                        c.estimate.to_string(),
                        c.std_error.to_string(),
                        c.t_stat.to_string(),
                        c.p_value.to_string(),
                        stars(c.p_value).to_string(),
                    ]);
                }
            }
            Outcome::Error(e) => {
                let mut row = vec![p.asset_id.clone(), p.index_id.clone(), "error".into(), e.clone()];
                row.extend(std::iter::repeat_n(String::new(), 4));
                rows.push(row);
            }
        }
    }
    Table {
        title: "Regression coefficients".into(),
        header: [
            "asset",
            "index",
            "term",
            "estimate",
            "std_error",
            "t_stat",
            "p_value",
            "stars",
        ]
        .map(String::from)
        .to_vec(),
        rows,
        note: None,
    }
}

fn verdict_table(report: &Report) -> Table {
    let v = &report.verdicts;
    let header = std::iter::once("Asset".to_string())
        .chain(v.indices.iter().cloned())
        .chain(["SafeHaven", "Hedge", "Diversifier", "None"].map(String::from))
        .collect();
    let rows = if report.pairs.is_empty() {
        Vec::new()
    } else {
        v.assets
            .iter()
            .zip(&v.labels)
            .zip(&v.counts)
            .map(|((a, labels), c)| {
                std::iter::once(a.clone())
                    .chain(
                        labels
                            .iter()
                            .map(|l| l.map(|l| l.to_string()).unwrap_or_else(|| "error".into())),
                    )
                    .chain([c.safe_haven, c.hedge, c.diversifier, c.none].map(|n| n.to_string()))
                    .collect()
            })
            .collect()
    };
    Table {
        title: "Classification".into(),
        header,
        rows,
        note: None,
    }
}

/// Tables for descriptive statistics (assets, indices), unit-root tests, diagnostics, the
/// crisis coefficient grid, full coefficients and verdicts; each as Markdown and CSV.
pub fn render_tables(report: &Report) -> Vec<Document> {
    let by_role = |role| report.series.iter().filter(|s| s.role == role).collect::<Vec<_>>();
    let tables = [
        (
            "descriptive_assets",
            descriptive_table("Descriptive statistics: assets", &by_role(SeriesRole::Asset)),
        ),
        (
            "descriptive_indices",
            descriptive_table("Descriptive statistics: indices", &by_role(SeriesRole::Index)),
        ),
        ("unit_root", unit_root_table(&report.series)),
        ("diagnostics", diagnostics_table(&report.series)),
        ("crisis_coefficients", crisis_table(report)),
        ("regression_coefficients", coefficient_table(report)),
        ("verdicts", verdict_table(report)),
    ];
    let mut docs = Vec::with_capacity(2 * tables.len() + 1);
    let mut combined = String::from("# Results\n\n");
    for (name, table) in &tables {
        let md = table.markdown();
        combined.push_str(&md);
        combined.push('\n');
        docs.push(Document::new(&format!("{name}.md"), md));
        docs.push(Document::new(&format!("{name}.csv"), table.csv()));
    }
    docs.push(Document::new("tables.md", combined));
    docs
}
