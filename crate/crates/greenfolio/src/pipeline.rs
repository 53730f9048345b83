//! Stage-by-stage orchestration from input files to scenario projections.
//!
//! Every stage runs in memory; nothing is written until the requested
//! stages have all succeeded.

use std::collections::BTreeMap;

use greenfolio_core::analytics::{covariance_matrix, mean_vector, sample_std, simple_returns, ReturnPanel};
use greenfolio_core::data::{
    align_years, check_unique_tickers, Alignment, AssetRecord, IntensitySeries, LossSeries, MarketSeries, Year,
    YearSpan,
};
use greenfolio_core::factor::{assemble_design, ols_fit, FactorModelFit};
use greenfolio_core::frontier::{
    backtest, build_hull, evaluate_samples, sample_weights, select_optimal, Backtest, FrontierHull, PortfolioSample,
};
use greenfolio_core::linalg::Matrix;
use greenfolio_core::scenario::{
    build_default_scenarios, run_scenarios, HistoricalSigmas, ScenarioContext, ScenarioProjection, ScenarioSpec,
};
use greenfolio_core::universe::{screen, universe_summary, RankedAsset, UniverseSummary};

use crate::config::{load_scenarios, RunConfig};
use crate::error::{Error, StageError, WithStage};
use crate::ingest;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Stage {
    Ingest,
    Screen,
    Frontier,
    Optimize,
    Backtest,
    Regress,
    Scenario,
    Report,
}

impl Stage {
    pub const ALL: [Stage; 8] = [
        Stage::Ingest,
        Stage::Screen,
        Stage::Frontier,
        Stage::Optimize,
        Stage::Backtest,
        Stage::Regress,
        Stage::Scenario,
        Stage::Report,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Ingest => "ingest",
            Stage::Screen => "screen",
            Stage::Frontier => "frontier",
            Stage::Optimize => "optimize",
            Stage::Backtest => "backtest",
            Stage::Regress => "regress",
            Stage::Scenario => "scenario",
            Stage::Report => "report",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Ingested {
    pub assets: Vec<AssetRecord>,
    pub losses: LossSeries,
    pub intensity: IntensitySeries,
    pub market: MarketSeries,
    pub alignment: Alignment,
}

#[derive(Debug, Clone)]
pub struct Universe {
    pub selected: Vec<RankedAsset>,
    pub summary: UniverseSummary,
}

impl Universe {
    pub fn assets(&self) -> Vec<AssetRecord> {
        self.selected.iter().map(|r| r.asset.clone()).collect()
    }

    pub fn tickers(&self) -> Vec<String> {
        self.selected.iter().map(|r| r.asset.ticker().to_string()).collect()
    }
}

#[derive(Debug, Clone)]
pub struct Frontier {
    pub panel: ReturnPanel,
    pub mean: Vec<f64>,
    pub covariance: Matrix,
    pub samples: Vec<PortfolioSample>,
    pub hull: FrontierHull,
}

#[derive(Debug, Clone)]
pub struct Regression {
    pub years: Vec<Year>,
    pub fit: FactorModelFit,
}

#[derive(Debug, Clone)]
pub struct Projections {
    pub specs: Vec<ScenarioSpec>,
    pub context: ScenarioContext,
    pub sigmas: HistoricalSigmas,
    pub results: Vec<ScenarioProjection>,
}

/// Results of every stage that ran.
#[derive(Debug, Clone)]
pub struct RunOutputs {
    pub config: RunConfig,
    pub last_stage: Stage,
    pub ingested: Ingested,
    pub universe: Option<Universe>,
    pub frontier: Option<Frontier>,
    /// Position of the optimal portfolio in `frontier.samples`.
    pub optimal: Option<usize>,
    pub backtest: Option<Backtest>,
    pub regression: Option<Regression>,
    pub projections: Option<Projections>,
}

impl RunOutputs {
    pub fn optimal_sample(&self) -> Option<&PortfolioSample> {
        Some(&self.frontier.as_ref()?.samples[self.optimal?])
    }
}

pub fn ingest(config: &RunConfig) -> Result<Ingested, StageError> {
    let stage = Stage::Ingest.name();
    let inputs = &config.inputs;
    let assets = ingest::load_assets(&inputs.assets).stage(stage)?;
    check_unique_tickers(&assets).stage(stage)?;
    let losses = ingest::load_losses(&inputs.losses).stage(stage)?;
    let intensity = ingest::load_intensity(&inputs.intensity).stage(stage)?;
    let market = ingest::load_market(&inputs.market).stage(stage)?;
    let span = match config.span {
        Some(s) => YearSpan::new(s.start, s.end).map_err(|e| Error::Config(e.to_string())).stage(stage)?,
        None => market.span().ok_or(Error::Config("market series is empty".into())).stage(stage)?,
    };
    let alignment = align_years(&assets, &market, span).stage(stage)?;
    Ok(Ingested { assets, losses, intensity, market, alignment })
}

pub fn screen_universe(config: &RunConfig, ingested: &Ingested) -> Result<Universe, StageError> {
    let stage = Stage::Screen.name();
    let selected = screen(&ingested.alignment.retained, &config.screening, &ingested.market).stage(stage)?;
    let assets: Vec<AssetRecord> = selected.iter().map(|r| r.asset.clone()).collect();
    let summary = universe_summary(&assets).stage(stage)?;
    Ok(Universe { selected, summary })
}

pub fn build_frontier(config: &RunConfig, ingested: &Ingested, universe: &Universe) -> Result<Frontier, StageError> {
    let stage = Stage::Frontier.name();
    let assets = universe.assets();
    let panel = ReturnPanel::from_prices(&assets, &ingested.market, ingested.alignment.span).stage(stage)?;
    let mean = mean_vector(&panel).stage(stage)?;
    let covariance = covariance_matrix(&panel).stage(stage)?;
    let env: Vec<f64> = assets.iter().map(AssetRecord::env_score).collect();
    let weights = sample_weights(assets.len(), config.sample_count, config.seed(), config.sampling).stage(stage)?;
    let samples = evaluate_samples(weights, &mean, &covariance, &env).stage(stage)?;
    let hull = build_hull(&samples).stage(stage)?;
    Ok(Frontier { panel, mean, covariance, samples, hull })
}

pub fn optimize(config: &RunConfig, frontier: &Frontier) -> Result<usize, StageError> {
    let best = select_optimal(&frontier.samples, config.risk_free_rate).stage(Stage::Optimize.name())?;
    Ok(frontier.samples.iter().position(|s| s.index == best.index).expect("selected from these samples"))
}

pub fn run_backtest(
    config: &RunConfig,
    ingested: &Ingested,
    universe: &Universe,
    optimal: &PortfolioSample,
) -> Result<Backtest, StageError> {
    backtest(
        &optimal.weights,
        &universe.assets(),
        ingested.alignment.span,
        config.initial_value,
        Some(&ingested.market),
    )
    .stage(Stage::Backtest.name())
}

fn market_returns(ingested: &Ingested) -> Result<BTreeMap<Year, f64>, greenfolio_core::Error> {
    let span = ingested.alignment.span;
    let levels: BTreeMap<Year, f64> =
        ingested.market.levels().range(span.start..=span.end).map(|(y, v)| (*y, *v)).collect();
    simple_returns(&levels)
}

pub fn regress(config: &RunConfig, ingested: &Ingested, backtest: &Backtest) -> Result<Regression, StageError> {
    let stage = Stage::Regress.name();
    let portfolio: BTreeMap<Year, f64> = backtest.portfolio_returns().collect();
    let market = market_returns(ingested).stage(stage)?;
    let design = assemble_design(&portfolio, &market, &ingested.losses, &ingested.intensity, config.risk_free_rate)
        .stage(stage)?;
    let fit = ols_fit(&design.response, &design.matrix).stage(stage)?;
    Ok(Regression { years: design.years, fit })
}

/// Each series' ex-ante Sharpe ratio uses its own realised volatility over
/// the backtest years.
pub fn project(
    config: &RunConfig,
    ingested: &Ingested,
    backtest: &Backtest,
    regression: &Regression,
) -> Result<Projections, StageError> {
    let stage = Stage::Scenario.name();
    let context =
        ScenarioContext::from_history(&ingested.losses, &ingested.intensity, &ingested.market).stage(stage)?;
    let specs = match &config.scenarios.file {
        Some(path) => load_scenarios(path).stage(stage)?,
        None => {
            build_default_scenarios(&ingested.losses, &ingested.intensity, &ingested.market, &config.scenarios.defaults)
                .stage(stage)?
                .to_vec()
        }
    };
    let portfolio: Vec<f64> = backtest.portfolio_returns().map(|(_, r)| r).collect();
    let market: Vec<f64> = market_returns(ingested).stage(stage)?.into_values().collect();
    let sigmas =
        HistoricalSigmas { portfolio: sample_std(&portfolio).stage(stage)?, market: sample_std(&market).stage(stage)? };
    let results =
        run_scenarios(&regression.fit.loadings, &specs, &context, config.risk_free_rate, sigmas).stage(stage)?;
    Ok(Projections { specs, context, sigmas, results })
}

/// Runs every stage up to and including `last`.
pub fn run_through(config: &RunConfig, last: Stage) -> Result<RunOutputs, StageError> {
    config.validate().stage("config")?;
    let ingested = ingest(config)?;
    let mut out = RunOutputs {
        config: config.clone(),
        last_stage: last,
        ingested,
        universe: None,
        frontier: None,
        optimal: None,
        backtest: None,
        regression: None,
        projections: None,
    };
    if last < Stage::Screen {
        return Ok(out);
    }
    let universe = screen_universe(config, &out.ingested)?;
    if last >= Stage::Frontier {
        let frontier = build_frontier(config, &out.ingested, &universe)?;
        if last >= Stage::Optimize {
            out.optimal = Some(optimize(config, &frontier)?);
        }
        out.frontier = Some(frontier);
    }
    out.universe = Some(universe);
    if last < Stage::Backtest {
        return Ok(out);
    }
    let bt = run_backtest(
        config,
        &out.ingested,
        out.universe.as_ref().expect("screened"),
        out.optimal_sample().expect("optimized"),
    )?;
    if last >= Stage::Regress {
        let regression = regress(config, &out.ingested, &bt)?;
        if last >= Stage::Scenario {
            out.projections = Some(project(config, &out.ingested, &bt, &regression)?);
        }
        out.regression = Some(regression);
    }
    out.backtest = Some(bt);
    Ok(out)
}
