use std::path::Path;

use chrono::{Duration, NaiveDate};
use safehaven::classify::Label;
use safehaven::garch::{simulate_garch11_values, GarchParams};
use safehaven::ingest::business_days;
use safehaven::report::{read_correlation_path, run_pipeline, write_outputs, PipelineConfig, SeriesEntry};
use safehaven::Error;

const ASSETS: [&str; 8] = ["BTC", "ADA", "DOGE", "ETH", "LTC", "XRP", "USDT", "GOLD"];
const INDICES: [&str; 10] = [
    "BEL20", "BIST100", "CAC40", "DAX30", "FTSE100", "FTSEMIB", "IBEX35", "IMOEX", "OMXS30", "PSI20",
];

fn start() -> NaiveDate {
    NaiveDate::from_ymd_opt(2020, 1, 1).unwrap()
}

fn calendar_days(n: usize) -> Vec<NaiveDate> {
    (0..n as i64).map(|k| start() + Duration::days(k)).collect()
}

fn write_prices(path: &Path, dates: &[NaiveDate], returns: &[f64]) {
    let mut text = String::from("date,close\n");
    let mut p = 100.0;
    text.push_str(&format!("{},{p}\n", dates[0]));
    for (d, r) in dates[1..].iter().zip(returns) {
        p *= (r / 100.0).exp();
        text.push_str(&format!("{d},{p}\n"));
    }
    std::fs::write(path, text).unwrap();
}

fn garch(seed: u64, n: usize) -> Vec<f64> {
    let g = GarchParams::new(0.0, 0.2, 0.1, 0.8).unwrap();
    simulate_garch11_values(&g, n, seed).unwrap()
}

/// Indices trade on weekdays, assets every calendar day; assets load on a common market factor
/// with asset-specific signs so the verdicts vary.
fn write_fixture(dir: &Path, assets: &[&str], indices: &[&str]) -> PipelineConfig {
    let n_bd = 140;
    let market = garch(1, n_bd);
    let bd = business_days(start(), n_bd + 1);
    let index_entries = indices
        .iter()
        .enumerate()
        .map(|(k, id)| {
            let own = garch(100 + k as u64, n_bd);
            let r: Vec<f64> = market.iter().zip(&own).map(|(m, o)| 0.8 * m + 0.6 * o).collect();
            let path = dir.join(format!("{id}.csv"));
            write_prices(&path, &bd, &r);
            SeriesEntry::new(id, path)
        })
        .collect();

    let cal = calendar_days(bd.last().unwrap().signed_duration_since(start()).num_days() as usize + 1);
    let asset_entries = assets
        .iter()
        .enumerate()
        .map(|(k, id)| {
            let loading = [0.6, -0.4, 0.2, 0.0][k % 4];
            let own = garch(200 + k as u64, cal.len() - 1);
            let mut m = market.iter();
            let r: Vec<f64> = cal[1..]
                .iter()
                .zip(&own)
                .map(|(d, o)| {
                    let f = if bd.contains(d) { *m.next().unwrap_or(&0.0) } else { 0.0 };
                    loading * f + o
                })
                .collect();
            let path = dir.join(format!("{id}.csv"));
            write_prices(&path, &cal, &r);
            SeriesEntry::new(id, path)
        })
        .collect();
    let mut cfg = PipelineConfig::new(asset_entries, index_entries);
    cfg.output.dir = dir.join("out");
    cfg
}

#[test]
fn full_grid_is_complete_and_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_fixture(dir.path(), &ASSETS, &INDICES);
    let first = run_pipeline(&cfg).unwrap();
    let second = run_pipeline(&cfg).unwrap();

    assert_eq!(first.pairs.len(), 80);
    let failures: Vec<_> = first.pairs.iter().filter_map(|p| p.outcome.error()).collect();
    assert!(failures.is_empty(), "{failures:?}");
    assert_eq!(
        first.verdicts.labels.iter().flatten().filter(|l| l.is_some()).count(),
        80
    );
    for c in &first.verdicts.counts {
        assert_eq!(c.total, 10);
    }
    assert_eq!(first.series.len(), 18);
    assert_eq!(first.to_json().unwrap(), second.to_json().unwrap());

    let labels: std::collections::HashSet<Label> = first.verdicts.labels.iter().flatten().flatten().copied().collect();
    assert!(labels.len() >= 2, "{labels:?}");

    let out = dir.path().join("out");
    let files = write_outputs(&first, &out).unwrap();
    assert!(files.iter().any(|f| f.ends_with("report.json")));
    assert_eq!(std::fs::read_dir(out.join("correlation_paths")).unwrap().count(), 80);
    let svg = std::fs::read_to_string(out.join("heatmap.svg")).unwrap();
    roxmltree::Document::parse(&svg).unwrap();

    let p = &first.correlation_paths[0];
    let back = read_correlation_path(
        &out.join("correlation_paths")
            .join(format!("rho_{}_{}.csv", p.asset_id, p.index_id)),
    )
    .unwrap();
    assert_eq!(back.dates, p.dates);
    assert!(back.rho.iter().zip(&p.rho).all(|(a, b)| (a - b).abs() <= 1e-9));
}

#[test]
fn minimal_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_fixture(dir.path(), &["USDT"], &["DAX30"]);
    let report = run_pipeline(&cfg).unwrap();
    assert_eq!(report.pairs.len(), 1);
    assert_eq!(report.verdicts.labels, vec![vec![report.verdicts.labels[0][0]]]);
    let r = report.pairs[0].outcome.ok().unwrap();
    assert_eq!(r.regression.coefficients.len(), 5);
    assert_eq!(r.crisis_observations, 15);
    assert_eq!(r.crisis_window.0, NaiveDate::from_ymd_opt(2020, 3, 11).unwrap());
    assert!(report.correlation_matrix.ok().is_some());
}

#[test]
fn missing_file_is_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = write_fixture(dir.path(), &["USDT"], &["DAX30"]);
    cfg.indices[0].path = dir.path().join("absent.csv");
    match run_pipeline(&cfg) {
        Err(Error::Config(msg)) => assert!(msg.contains("absent.csv"), "{msg}"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn a_broken_series_only_fails_its_pairs() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = write_fixture(dir.path(), &["BTC", "USDT"], &["DAX30", "CAC40"]);
    let flat = dir.path().join("flat.csv");
    let dates = calendar_days(200);
    write_prices(&flat, &dates, &vec![0.0; 199]);
    cfg.assets[1].path = flat;

    let report = run_pipeline(&cfg).unwrap();
    assert_eq!(report.pairs.len(), 4);
    assert_eq!(report.succeeded(), 2);
    for p in &report.pairs {
        assert_eq!(p.outcome.ok().is_some(), p.asset_id == "BTC", "{p:?}");
    }
    assert_eq!(report.verdicts.labels[1], vec![None, None]);

    cfg.assets.remove(0);
    assert!(matches!(
        run_pipeline(&cfg),
        Err(Error::AllPairsFailed { attempted: 2, .. })
    ));
}
