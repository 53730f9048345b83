//! Rendering of stage results into files, and all-or-nothing writing.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use greenfolio_core::factor::COEFFICIENT_LABELS;
use greenfolio_core::frontier::{green_excess_return, green_sharpe};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::format::{json_num, json_nums, num};
use crate::pipeline::{RunOutputs, Stage};

pub const MANIFEST: &str = "manifest.json";

/// A rendered output file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub name: &'static str,
    pub contents: String,
}

fn artifact(name: &'static str, contents: String) -> Artifact {
    Artifact { name, contents }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

/// File names written by a stage.
pub fn stage_files(stage: Stage) -> &'static [&'static str] {
    match stage {
        Stage::Ingest => &["ingest.json"],
        Stage::Screen => &["universe.csv"],
        Stage::Frontier => &["samples.csv", "hull.json"],
        Stage::Optimize => &["optimal.json"],
        Stage::Backtest => &["backtest.csv"],
        Stage::Regress => &["fit.json"],
        Stage::Scenario => &["projections.csv"],
        Stage::Report => &["report.md"],
    }
}

/// Renders the files of `stages` plus the manifest.
pub fn render(out: &RunOutputs, stages: &[Stage], command: &str) -> Result<Vec<Artifact>> {
    let mut files = Vec::new();
    for stage in stages {
        match stage {
            Stage::Ingest => files.push(artifact("ingest.json", ingest_json(out))),
            Stage::Screen => files.push(artifact("universe.csv", universe_csv(out))),
            Stage::Frontier => {
                files.push(artifact("samples.csv", samples_csv(out)?));
                files.push(artifact("hull.json", hull_json(out)));
            }
            Stage::Optimize => files.push(artifact("optimal.json", optimal_json(out)?)),
            Stage::Backtest => files.push(artifact("backtest.csv", backtest_csv(out))),
            Stage::Regress => files.push(artifact("fit.json", fit_json(out))),
            Stage::Scenario => files.push(artifact("projections.csv", projections_csv(out))),
            Stage::Report => files.push(artifact("report.md", report_md(out)?)),
        }
    }
    let names: Vec<&str> = files.iter().map(|f| f.name).collect();
    files.push(artifact(MANIFEST, manifest_json(out, command, &names)?));
    Ok(files)
}

fn ingest_json(out: &RunOutputs) -> String {
    let ing = &out.ingested;
    let span_of =
        |m: &std::collections::BTreeMap<i32, f64>| json!([m.keys().next().copied(), m.keys().next_back().copied()]);
    let dropped: Map<String, Value> =
        ing.alignment.dropped.iter().map(|(t, years)| (t.clone(), json!(years))).collect();
    pretty(&json!({
        "assets_read": ing.assets.len(),
        "assets_aligned": ing.alignment.retained.len(),
        "span": [ing.alignment.span.start, ing.alignment.span.end],
        "dropped_for_missing_years": dropped,
        "losses_years": span_of(ing.losses.entries()),
        "intensity_years": span_of(ing.intensity.entries()),
        "market_years": span_of(ing.market.levels()),
    }))
}

fn universe_csv(out: &RunOutputs) -> String {
    let universe = out.universe.as_ref().expect("screen ran");
    let mut s =
        String::from("ticker,name,cap_class,env_score,long_cagr,short_cagr,excess_over_market,composite_rank\n");
    for r in &universe.selected {
        let a = &r.asset;
        writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            csv_field(a.ticker()),
            csv_field(a.name()),
            a.cap_class(),
            num(a.env_score()),
            num(r.metrics.long_cagr),
            num(r.metrics.short_cagr),
            num(r.metrics.excess_over_market),
            num(r.composite_rank)
        )
        .expect("string write");
    }
    s
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn samples_csv(out: &RunOutputs) -> Result<String> {
    let universe = out.universe.as_ref().expect("screen ran");
    let frontier = out.frontier.as_ref().expect("frontier ran");
    let r_f = out.config.risk_free_rate;
    let mut s = String::from("index,mu,sigma,es,green_sharpe");
    for t in universe.tickers() {
        s.push_str(",w_");
        s.push_str(&t);
    }
    s.push('\n');
    for p in &frontier.samples {
        // zero-volatility samples have no ratio; leave the cell as NaN
        let gs = green_sharpe(p.mu, p.sigma, p.es, r_f).unwrap_or(f64::NAN);
        write!(s, "{},{},{},{},{}", p.index, num(p.mu), num(p.sigma), num(p.es), num(gs)).expect("string write");
        for w in &p.weights {
            s.push(',');
            s.push_str(&num(*w));
        }
        s.push('\n');
    }
    Ok(s)
}

fn hull_json(out: &RunOutputs) -> String {
    let frontier = out.frontier.as_ref().expect("frontier ran");
    let facets: Vec<Value> = frontier
        .hull
        .facets
        .iter()
        .map(|f| json!({ "vertices": f.vertices, "normal": json_nums(&f.normal), "offset": json_num(f.offset) }))
        .collect();
    pretty(&json!({
        "axes": ["mu", "sigma", "es"],
        "sample_count": frontier.samples.len(),
        "vertices": frontier.hull.vertices,
        "facets": facets,
    }))
}

fn optimal_json(out: &RunOutputs) -> Result<String> {
    let universe = out.universe.as_ref().expect("screen ran");
    let frontier = out.frontier.as_ref().expect("frontier ran");
    let best = out.optimal_sample().expect("optimize ran");
    let r_f = out.config.risk_free_rate;
    let weights: Map<String, Value> =
        universe.tickers().into_iter().zip(&best.weights).map(|(t, w)| (t, json_num(*w))).collect();
    let on_hull = frontier.hull.vertices.binary_search(&best.index).is_ok();
    Ok(pretty(&json!({
        "index": best.index,
        "risk_free_rate": json_num(r_f),
        "mu": json_num(best.mu),
        "sigma": json_num(best.sigma),
        "es": json_num(best.es),
        "green_sharpe": json_num(green_sharpe(best.mu, best.sigma, best.es, r_f)?),
        "green_excess_return": json_num(green_excess_return(best.mu, best.es, r_f)),
        "hull_vertex": on_hull,
        "weights": weights,
    })))
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn backtest_csv(out: &RunOutputs) -> String {
    let bt = out.backtest.as_ref().expect("backtest ran");
    let mut s = String::from("year,value,return,market_return\n");
    let first = &bt.snapshots[0];
    writeln!(s, "{},{},,", first.year, num(first.value)).expect("string write");
    for (snap, (year, r, m)) in bt.snapshots[1..].iter().zip(&bt.returns) {
        debug_assert_eq!(snap.year, *year);
        writeln!(s, "{year},{},{},{}", num(snap.value), num(*r), opt(*m)).expect("string write");
    }
    s
}

fn fit_json(out: &RunOutputs) -> String {
    let reg = out.regression.as_ref().expect("regress ran");
    let f = &reg.fit;
    let per_label = |values: [f64; 4]| -> Value {
        Value::Object(COEFFICIENT_LABELS.iter().zip(values).map(|(l, v)| (l.to_string(), json_num(v))).collect())
    };
    pretty(&json!({
        "coefficients": per_label(f.loadings.as_array()),
        "std_errors": per_label(f.std_errors),
        "t_stats": per_label(f.t_stats),
        "p_values": per_label(f.p_values),
        "r_squared": json_num(f.r_squared),
        "n_obs": f.n_obs,
        "dof": f.dof,
        "years": [reg.years.first(), reg.years.last()],
    }))
}

fn projections_csv(out: &RunOutputs) -> String {
    let p = out.projections.as_ref().expect("scenario ran");
    let mut s = String::from("scenario,year_offset,market_return,pf,tf,portfolio_return\n");
    for proj in &p.results {
        for y in &proj.years {
            writeln!(
                s,
                "{},{},{},{},{},{}",
                csv_field(&proj.name),
                y.offset,
                num(y.market_return),
                num(y.pf),
                num(y.tf),
                num(y.portfolio_return)
            )
            .expect("string write");
        }
    }
    s.push('\n');
    s.push_str("scenario,cum3y_portfolio,cum3y_market,sharpe_portfolio,sharpe_market\n");
    for proj in &p.results {
        writeln!(
            s,
            "{},{},{},{},{}",
            csv_field(&proj.name),
            num(proj.cumulative_3y_portfolio),
            num(proj.cumulative_3y_market),
            num(proj.ex_ante_sharpe_portfolio),
            num(proj.ex_ante_sharpe_market)
        )
        .expect("string write");
    }
    s
}

fn manifest_json(out: &RunOutputs, command: &str, files: &[&str]) -> Result<String> {
    let config = serde_json::to_value(&out.config).map_err(|e| Error::Config(e.to_string()))?;
    Ok(pretty(&json!({
        "tool": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "seed": out.config.seed,
        "config": config,
        "outputs": files,
    })))
}

fn report_md(out: &RunOutputs) -> Result<String> {
    let universe = out.universe.as_ref().expect("screen ran");
    let frontier = out.frontier.as_ref().expect("frontier ran");
    let best = out.optimal_sample().expect("optimize ran");
    let bt = out.backtest.as_ref().expect("backtest ran");
    let reg = out.regression.as_ref().expect("regress ran");
    let proj = out.projections.as_ref().expect("scenario ran");
    let r_f = out.config.risk_free_rate;
    let span = out.ingested.alignment.span;

    let mut s = String::new();
    let w = &mut s;
    writeln!(w, "# Green portfolio report\n").unwrap();
    writeln!(w, "Seed {}, risk-free rate {}, span {}-{}.\n", out.config.seed(), num(r_f), span.start, span.end)
        .unwrap();

    writeln!(w, "## Universe\n").unwrap();
    let sm = &universe.summary;
    let classes: Vec<String> = sm.per_class.iter().map(|(c, n)| format!("{n} {c}")).collect();
    writeln!(w, "{} assets ({}), mean environmental score {}.", sm.count, classes.join(", "), num(sm.mean_env_score))
        .unwrap();
    if let Some(n) = sm.sector_count {
        writeln!(w, "{n} sectors represented.").unwrap();
    }
    let dropped = &out.ingested.alignment.dropped;
    if !dropped.is_empty() {
        let names: Vec<&str> = dropped.iter().map(|(t, _)| t.as_str()).collect();
        writeln!(w, "Dropped for missing years: {}.", names.join(", ")).unwrap();
    }

    writeln!(w, "\n## Frontier\n").unwrap();
    writeln!(
        w,
        "{} sampled portfolios; the hull has {} vertices and {} facets.\n",
        frontier.samples.len(),
        frontier.hull.vertices.len(),
        frontier.hull.facets.len()
    )
    .unwrap();
    writeln!(w, "| metric | value |\n|---|---|").unwrap();
    writeln!(w, "| sample index | {} |", best.index).unwrap();
    writeln!(w, "| expected return | {} |", num(best.mu)).unwrap();
    writeln!(w, "| volatility | {} |", num(best.sigma)).unwrap();
    writeln!(w, "| environmental score | {} |", num(best.es)).unwrap();
    writeln!(w, "| green Sharpe ratio | {} |", num(green_sharpe(best.mu, best.sigma, best.es, r_f)?)).unwrap();
    writeln!(w, "| green excess return | {} |\n", num(green_excess_return(best.mu, best.es, r_f))).unwrap();
    writeln!(w, "| ticker | weight |\n|---|---|").unwrap();
    for (t, x) in universe.tickers().iter().zip(&best.weights) {
        writeln!(w, "| {t} | {} |", num(*x)).unwrap();
    }

    writeln!(w, "\n## Backtest\n").unwrap();
    let first = bt.snapshots.first().expect("non-empty span");
    let last = bt.snapshots.last().expect("non-empty span");
    let market_growth = match (out.ingested.market.level(first.year), out.ingested.market.level(last.year)) {
        (Some(a), Some(b)) => first.value * b / a,
        _ => f64::NAN,
    };
    writeln!(
        w,
        "Buy-and-hold value grew from {} in {} to {} in {}; the market index over the same years would reach {}.",
        num(first.value),
        first.year,
        num(last.value),
        last.year,
        num(market_growth)
    )
    .unwrap();

    writeln!(w, "\n## Factor regression\n").unwrap();
    let f = &reg.fit;
    writeln!(w, "| term | coefficient | std. error | t | p |\n|---|---|---|---|---|").unwrap();
    let coefs = f.loadings.as_array();
    for (j, label) in COEFFICIENT_LABELS.iter().enumerate() {
        writeln!(
            w,
            "| {label} | {} | {} | {} | {} |",
            num(coefs[j]),
            num(f.std_errors[j]),
            num(f.t_stats[j]),
            num(f.p_values[j])
        )
        .unwrap();
    }
    writeln!(w, "\nR² = {}, {} observations, {} residual degrees of freedom.", num(f.r_squared), f.n_obs, f.dof)
        .unwrap();

    writeln!(w, "\n## Scenarios\n").unwrap();
    writeln!(
        w,
        "Baseline market rate {}, last intensity {}. Historical volatility: portfolio {}, market {}.\n",
        num(proj.context.baseline_market),
        num(proj.context.last_intensity),
        num(proj.sigmas.portfolio),
        num(proj.sigmas.market)
    )
    .unwrap();
    writeln!(
        w,
        "| scenario | 3y portfolio | 3y market | gap | Sharpe portfolio | Sharpe market |\n|---|---|---|---|---|---|"
    )
    .unwrap();
    for p in &proj.results {
        writeln!(
            w,
            "| {} | {} | {} | {} | {} | {} |",
            p.name,
            num(p.cumulative_3y_portfolio),
            num(p.cumulative_3y_market),
            num(p.cumulative_gap()),
            num(p.ex_ante_sharpe_portfolio),
            num(p.ex_ante_sharpe_market)
        )
        .unwrap();
    }
    Ok(s)
}

/// Writes all artifacts or none.
///
/// Files are staged under temporary names and renamed once every write has
/// succeeded; on failure the staged and already-renamed files are removed.
pub fn write_all(dir: &Path, files: &[Artifact]) -> Result<Vec<PathBuf>> {
    let write_err = |path: &Path, source| Error::Write { path: path.to_path_buf(), source };
    std::fs::create_dir_all(dir).map_err(|e| write_err(dir, e))?;
    let staged: Vec<(PathBuf, PathBuf)> =
        files.iter().map(|f| (dir.join(format!(".{}.partial", f.name)), dir.join(f.name))).collect();
    let cleanup = |upto_renamed: usize| {
        for (i, (tmp, fin)) in staged.iter().enumerate() {
            let _ = std::fs::remove_file(tmp);
            if i < upto_renamed {
                let _ = std::fs::remove_file(fin);
            }
        }
    };
    for (f, (tmp, _)) in files.iter().zip(&staged) {
        if let Err(e) = std::fs::write(tmp, &f.contents) {
            cleanup(0);
            return Err(write_err(tmp, e));
        }
    }
    for (i, (tmp, fin)) in staged.iter().enumerate() {
        if let Err(e) = std::fs::rename(tmp, fin) {
            cleanup(i);
            return Err(write_err(fin, e));
        }
    }
    Ok(staged.into_iter().map(|(_, fin)| fin).collect())
}
