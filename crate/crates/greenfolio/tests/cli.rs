use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn greenfolio(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_greenfolio")).args(args).output().expect("binary runs")
}

fn config_path() -> String {
    fixtures().join("config.toml").display().to_string()
}

fn run_in(out: &Path, extra: &[&str]) -> Output {
    let config = config_path();
    let mut args = vec![extra[0], "--config", &config, "--out", out.to_str().unwrap()];
    args.extend_from_slice(&extra[1..]);
    greenfolio(&args)
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Copies the fixture inputs into `dir` and writes a config pointing at them.
fn scratch_inputs(dir: &Path) -> PathBuf {
    for f in ["assets.csv", "losses.csv", "intensity.csv", "market.csv"] {
        std::fs::copy(fixtures().join(f), dir.join(f)).unwrap();
    }
    let config = dir.join("config.toml");
    std::fs::write(
        &config,
        "seed = 1\nsample_count = 200\n[inputs]\nassets = \"assets.csv\"\nlosses = \"losses.csv\"\n\
         intensity = \"intensity.csv\"\nmarket = \"market.csv\"\n",
    )
    .unwrap();
    config
}

#[test]
fn full_run_writes_every_output() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), &["run"]);
    assert!(o.status.success(), "{}", stderr(&o));
    for f in [
        "samples.csv",
        "hull.json",
        "optimal.json",
        "backtest.csv",
        "fit.json",
        "projections.csv",
        "manifest.json",
        "report.md",
    ] {
        assert!(dir.path().join(f).is_file(), "{f} missing");
    }
    let leftovers: Vec<_> = std::fs::read_dir(dir.path())
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| e.file_name().to_string_lossy().ends_with(".partial"))
        .collect();
    assert!(leftovers.is_empty());

    let backtest = std::fs::read_to_string(dir.path().join("backtest.csv")).unwrap();
    let mut lines = backtest.lines();
    assert_eq!(lines.next(), Some("year,value,return,market_return"));
    assert_eq!(lines.next(), Some("1999,100,,"));
    assert_eq!(lines.count(), 24);

    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 42);
    assert_eq!(manifest["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(manifest["config"]["sample_count"], 20000);
}

#[test]
fn same_seed_gives_identical_samples() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let o = run_in(d.path(), &["frontier", "--samples", "500"]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let read = |d: &tempfile::TempDir, f: &str| std::fs::read(d.path().join(f)).unwrap();
    assert_eq!(read(&a, "samples.csv"), read(&b, "samples.csv"));
    assert_eq!(read(&a, "hull.json"), read(&b, "hull.json"));

    let c = tempfile::tempdir().unwrap();
    assert!(run_in(c.path(), &["frontier", "--samples", "500", "--seed", "43"]).status.success());
    assert_ne!(read(&a, "samples.csv"), read(&c, "samples.csv"));
}

#[test]
fn frontier_sample_count_override() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), &["frontier", "--samples", "100", "--seed", "7"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let samples = std::fs::read_to_string(dir.path().join("samples.csv")).unwrap();
    let mut lines = samples.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("index,mu,sigma,es,green_sharpe,w_"));
    assert_eq!(header.split(',').count(), 5 + 25);
    assert_eq!(lines.count(), 100);
    // a subcommand writes only its own stage outputs
    assert!(!dir.path().join("fit.json").exists());
    assert!(dir.path().join("manifest.json").exists());
}

#[test]
fn regress_reports_four_coefficients() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), &["regress", "--samples", "300"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let fit: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("fit.json")).unwrap()).unwrap();
    for key in ["coefficients", "std_errors", "t_stats", "p_values"] {
        let obj = fit[key].as_object().unwrap();
        assert_eq!(obj.keys().map(String::as_str).collect::<Vec<_>>(), ["const", "ind", "pf", "tf"]);
    }
    assert_eq!(fit["n_obs"], 24);
    assert_eq!(fit["dof"], 20);
}

#[test]
fn scenario_projects_four_by_three() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), &["scenario", "--samples", "300"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(dir.path().join("projections.csv")).unwrap();
    let (per_year, summary) = text.split_once("\n\n").unwrap();
    let rows: Vec<&str> = per_year.lines().skip(1).collect();
    assert_eq!(rows.len(), 12);
    let names: Vec<&str> = rows.iter().map(|r| r.split(',').next().unwrap()).collect();
    assert_eq!(names.iter().filter(|n| **n == "stress").count(), 3);
    assert!(rows[10].starts_with("stress,2,-0.075,25,"), "{}", rows[10]);
    let summary: Vec<&str> = summary.lines().collect();
    assert_eq!(summary[0], "scenario,cum3y_portfolio,cum3y_market,sharpe_portfolio,sharpe_market");
    assert_eq!(summary.len(), 5);
}

#[test]
fn report_aggregates_stages() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), &["report", "--samples", "300"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let report = std::fs::read_to_string(dir.path().join("report.md")).unwrap();
    for section in ["## Universe", "## Frontier", "## Backtest", "## Factor regression", "## Scenarios"] {
        assert!(report.contains(section), "{section}");
    }
    assert!(report.contains("Dropped for missing years: GRN31"));
}

#[test]
fn missing_market_file_fails_in_ingest() {
    let dir = tempfile::tempdir().unwrap();
    let config = scratch_inputs(dir.path());
    std::fs::remove_file(dir.path().join("market.csv")).unwrap();
    let out = dir.path().join("out");
    let o = greenfolio(&["run", "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    let err = stderr(&o);
    assert!(err.contains("ingest") && err.contains("market.csv"), "{err}");
    assert!(!out.exists() || std::fs::read_dir(&out).unwrap().next().is_none());
}

fn set_value(csv: &str, year: i32, value: &str) -> String {
    let prefix = format!("{year},");
    csv.lines()
        .map(|l| if l.starts_with(&prefix) { format!("{prefix}{value}") } else { l.to_string() })
        .collect::<Vec<_>>()
        .join("\n")
        + "\n"
}

fn expect_ingest_failure(dir: &Path, file: &str, edit: impl FnOnce(String) -> String, needle: &str) {
    let config = scratch_inputs(dir);
    let path = dir.join(file);
    std::fs::write(&path, edit(std::fs::read_to_string(&path).unwrap())).unwrap();
    let o = greenfolio(&["ingest", "--config", config.to_str().unwrap(), "--out", dir.join("out").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    let err = stderr(&o);
    assert!(err.contains("ingest") && err.contains(needle), "{err}");
}

#[test]
fn ingest_rejects_bad_inputs() {
    let dup = tempfile::tempdir().unwrap();
    expect_ingest_failure(
        dup.path(),
        "assets.csv",
        |s| s + "TCS,Tata Consultancy,large,60,2022,3000,it\nTCS,Tata Consultancy Services,large,60,2023,3100,it\n",
        "duplicate ticker \"TCS\"",
    );
    let env = tempfile::tempdir().unwrap();
    expect_ingest_failure(
        env.path(),
        "assets.csv",
        |s| s + "BAD,Bad,mid,120,2023,10,it\n",
        "env_score out of range: 120",
    );
    let loss = tempfile::tempdir().unwrap();
    expect_ingest_failure(loss.path(), "losses.csv", |s| set_value(&s, 2005, "-1"), "out of range: -1");
    let intensity = tempfile::tempdir().unwrap();
    expect_ingest_failure(intensity.path(), "intensity.csv", |s| set_value(&s, 1995, "0"), "out of range: 0");
}

#[test]
fn config_and_numerical_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), &["frontier", "--rf", "1.5"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));

    let o = greenfolio(&["run"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--config"));

    let scratch = tempfile::tempdir().unwrap();
    let config = scratch_inputs(scratch.path());
    let text = std::fs::read_to_string(&config).unwrap().replace("seed = 1\n", "");
    std::fs::write(&config, text).unwrap();
    let o = greenfolio(&["frontier", "--config", config.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("seed"));
    let o = greenfolio(&["frontier", "--config", config.to_str().unwrap(), "--seed", "5", "--samples", "50"]);
    assert!(o.status.success(), "{}", stderr(&o));

    // three samples cannot span a hull
    let o = run_in(dir.path(), &["frontier", "--samples", "3"]);
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
    assert!(stderr(&o).contains("frontier"));
    assert!(!dir.path().join("samples.csv").exists());
}

#[test]
fn unknown_subcommand_prints_usage() {
    let o = greenfolio(&["plot"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("Usage"));
}

#[test]
fn explicit_scenario_file_matches_defaults() {
    let defaults = tempfile::tempdir().unwrap();
    assert!(run_in(defaults.path(), &["scenario", "--samples", "300"]).status.success());

    let scratch = tempfile::tempdir().unwrap();
    let config = scratch_inputs(scratch.path());
    std::fs::copy(fixtures().join("scenarios.toml"), scratch.path().join("scenarios.toml")).unwrap();
    let fixture_config = std::fs::read_to_string(fixtures().join("config.toml")).unwrap();
    let inputs_at = fixture_config.find("[inputs]").unwrap();
    let text = format!("{}\n[scenarios]\nfile = \"scenarios.toml\"\n", &fixture_config[..inputs_at])
        + &std::fs::read_to_string(&config).unwrap().replace("seed = 1\nsample_count = 200\n", "");
    std::fs::write(&config, text).unwrap();
    let out = scratch.path().join("out");
    let o = greenfolio(&[
        "scenario",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--samples",
        "300",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(
        std::fs::read(defaults.path().join("projections.csv")).unwrap(),
        std::fs::read(out.join("projections.csv")).unwrap()
    );
}
