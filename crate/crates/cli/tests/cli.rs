use std::path::Path;
use std::process::{Command, Output};

fn safehaven(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_safehaven"))
        .args(args)
        .env_remove("SAFEHAVEN_OUTPUT_DIR")
        .output()
        .unwrap()
}

fn simulate(dir: &Path, preset: &str, seed: &str, length: &str) -> String {
    let out = dir.join(format!("{preset}.csv"));
    let o = safehaven(&[
        "simulate",
        "--preset",
        preset,
        "--seed",
        seed,
        "--length",
        length,
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    out.to_str().unwrap().to_string()
}

fn write_config(dir: &Path, data: &str, asset_column: &str) -> String {
    let cfg = format!(
        r#"
[[assets]]
id = "SIM_A"
path = "{data}"
value_column = "{asset_column}"
kind = "return"

[[indices]]
id = "SIM_I"
path = "{data}"
value_column = "index"
kind = "return"

[sample]
start = "2000-01-03"
end = "2001-12-31"

[crisis]
announcement = "2001-03-12"

[output]
dir = "out"
"#
    );
    let path = dir.join("config.toml");
    std::fs::write(&path, cfg).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn simulate_writes_requested_rows() {
    let dir = tempfile::tempdir().unwrap();
    let path = simulate(dir.path(), "garch", "3", "250");
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("date,return\n"));
    assert_eq!(text.lines().count(), 251);
    let again = std::fs::read_to_string(simulate(dir.path(), "garch", "3", "250")).unwrap();
    assert_eq!(text, again);
}

#[test]
fn test_series_reports_all_tests() {
    let dir = tempfile::tempdir().unwrap();
    let path = simulate(dir.path(), "garch", "5", "500");
    let o = safehaven(&["test-series", "--file", &path, "--kind", "return"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8(o.stdout).unwrap();
    for name in ["ADF", "PP", "ARCH-LM", "BPG"] {
        assert!(stdout.contains(name), "{stdout}");
    }
    assert!(stdout.contains("reject at 1%"), "{stdout}");
}

#[test]
fn run_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let data = simulate(dir.path(), "dcc", "11", "600");
    let cfg = write_config(dir.path(), &data, "asset");
    let o = safehaven(&["run", "--config", &cfg]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = dir.path().join("out");
    for f in [
        "report.json",
        "heatmap.svg",
        "crisis_coefficients.md",
        "verdicts.csv",
        "correlation_paths/rho_SIM_A_SIM_I.csv",
    ] {
        assert!(out.join(f).is_file(), "missing {f}");
    }

    let alt = dir.path().join("elsewhere");
    let o = Command::new(env!("CARGO_BIN_EXE_safehaven"))
        .args(["run", "--config", &cfg])
        .env("SAFEHAVEN_OUTPUT_DIR", &alt)
        .output()
        .unwrap();
    assert!(o.status.success());
    assert_eq!(
        std::fs::read(alt.join("report.json")).unwrap(),
        std::fs::read(out.join("report.json")).unwrap()
    );
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let o = safehaven(&["run", "--config", dir.path().join("missing.toml").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));

    let data = simulate(dir.path(), "dcc", "2", "300");
    let cfg = write_config(dir.path(), &data, "no_such_column");
    let o = safehaven(&["run", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
}
