use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use safehaven::ingest::{load_series, SeriesSchema, ValueKind};
use safehaven::report::config::TestConfig;
use safehaven::report::export::PRESET_LENGTH;
use safehaven::report::{run_pipeline, series_tests, write_outputs, Outcome, PipelineConfig, Preset};
use safehaven::Error;

const EXIT_CONFIG: u8 = 1;
const EXIT_ALL_PAIRS_FAILED: u8 = 2;

#[derive(Parser)]
#[command(
    name = "safehaven",
    version,
    about = "DCC-GARCH safe-haven analysis of asset/index pairs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline described by a TOML config.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Write a simulated data set as CSV.
    Simulate {
        #[arg(long, value_enum)]
        preset: PresetArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = PRESET_LENGTH)]
        length: usize,
    },
    /// Unit-root and heteroskedasticity tests for a single series.
    TestSeries {
        #[arg(long)]
        file: PathBuf,
        #[arg(long, default_value = "date")]
        date_column: String,
        /// Defaults to "close" for prices and "return" for returns.
        #[arg(long)]
        value_column: Option<String>,
        #[arg(long, value_enum, default_value_t = KindArg::Price)]
        kind: KindArg,
        #[arg(long, default_value_t = safehaven::diagnostics::DEFAULT_ARCH_LAGS)]
        arch_lags: usize,
        /// Print JSON instead of text.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PresetArg {
    Garch,
    Dcc,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Price,
    Return,
}

fn exit_code(e: &Error) -> ExitCode {
    match e {
        Error::AllPairsFailed { .. } => ExitCode::from(EXIT_ALL_PAIRS_FAILED),
        _ => ExitCode::from(EXIT_CONFIG),
    }
}

fn run(config: PathBuf) -> Result<(), Error> {
    let cfg = PipelineConfig::load(&config)?;
    let report = run_pipeline(&cfg)?;
    let out_dir = cfg.resolved_output_dir();
    let files = write_outputs(&report, &out_dir)?;
    for p in report.pairs.iter().filter_map(|p| p.outcome.error().map(|e| (p, e))) {
        eprintln!("pair {}/{} failed: {}", p.0.asset_id, p.0.index_id, p.1);
    }
    println!(
        "{} of {} pairs estimated; {} files written to {}",
        report.succeeded(),
        report.pairs.len(),
        files.len(),
        out_dir.display()
    );
    for c in &report.verdicts.counts {
        println!(
            "{:<12} safe-haven {:>2}  hedge {:>2}  diversifier {:>2}  none {:>2}",
            c.asset_id, c.safe_haven, c.hedge, c.diversifier, c.none
        );
    }
    Ok(())
}

fn test_series(
    file: PathBuf,
    date_column: &str,
    value_column: Option<String>,
    kind: KindArg,
    arch_lags: usize,
    json: bool,
) -> Result<(), Error> {
    let (kind, default_column) = match kind {
        KindArg::Price => (ValueKind::Price, "close"),
        KindArg::Return => (ValueKind::Return, "return"),
    };
    let value_column = value_column.unwrap_or_else(|| default_column.to_string());
    let id = file
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let schema = SeriesSchema::new(date_column, &value_column, kind);
    let returns = load_series(&file, &id, &schema)?.into_returns()?;
    let opts = TestConfig {
        arch_lags,
        ..TestConfig::default()
    };
    let tests = series_tests(&returns, &opts);
    if json {
        println!("{}", serde_json::to_string_pretty(&tests)?);
        return Ok(());
    }
    println!("series {id}: {} returns", returns.len());
    if let Outcome::Ok(d) = &tests.descriptive {
        println!(
            "  mean {:.4}  min {:.4}  max {:.4}  std {:.4}",
            d.mean, d.min, d.max, d.std_dev
        );
    }
    for (name, r) in [("ADF", &tests.adf), ("PP", &tests.pp)] {
        match r {
            Outcome::Ok(u) => println!(
                "  {name:<4} stat {:>9.3}  lags {:>2}  5% cv {:>7.3}  reject at {}",
                u.statistic,
                u.lags,
                u.critical_values.five,
                u.reject_at
                    .map(|l| format!("{:.0}%", l.level() * 100.0))
                    .unwrap_or_else(|| "-".into())
            ),
            Outcome::Error(e) => println!("  {name:<4} error: {e}"),
        }
    }
    for (name, r) in [("ARCH-LM", &tests.arch_lm), ("BPG", &tests.breusch_pagan)] {
        match r {
            Outcome::Ok(t) => println!(
                "  {name:<8} stat {:>9.3}  df {:>2}  p {:.4}",
                t.statistic, t.df, t.p_value
            ),
            Outcome::Error(e) => println!("  {name:<8} error: {e}"),
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config } => run(config),
        Command::Simulate {
            preset,
            seed,
            out,
            length,
        } => {
            let preset = match preset {
                PresetArg::Garch => Preset::Garch,
                PresetArg::Dcc => Preset::Dcc,
            };
            safehaven::report::write_simulation(preset, seed, length, &out)
                .map(|()| println!("wrote {length} observations to {}", out.display()))
        }
        Command::TestSeries {
            file,
            date_column,
            value_column,
            kind,
            arch_lags,
            json,
        } => test_series(file, &date_column, value_column, kind, arch_lags, json),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
