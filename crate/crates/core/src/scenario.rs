//! Climate scenarios over a three-year horizon.
//!
//! A [`ScenarioSpec`] holds per-year rules for the market return, the physical
//! risk factor (PF, disaster losses in USD bn) and the yearly decrement of the
//! transition risk factor (TF, emissions intensity). Rules are resolved against
//! a [`ScenarioContext`] built from history, then pushed through the factor
//! model to project portfolio returns.

use alloc::string::String;
use alloc::vec::Vec;

use crate::analytics::{cagr_between, mean, percentile};
use crate::data::{IntensitySeries, LossSeries, MarketSeries};
use crate::error::{Error, Result};
use crate::factor::FactorLoadings;

/// Projection horizon in years.
pub const HORIZON: usize = 3;

/// Trailing windows, in years, averaged for the baseline market rate.
pub const BASELINE_WINDOWS: [u32; 3] = [10, 15, 20];

/// Number of most recent loss observations used for PF percentiles.
pub const LOSS_WINDOW: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum MarketRule {
    /// The baseline market rate.
    Baseline,
    /// Baseline plus a signed offset.
    BaselineOffset(f64),
    /// A fixed annual return.
    Absolute(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum PfRule {
    /// Percentile (in `[0, 1]`) of the most recent [`LOSS_WINDOW`] losses.
    Percentile(f64),
    /// A fixed loss in USD billions.
    AbsoluteUsdBn(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct YearRule {
    pub market: MarketRule,
    pub pf: PfRule,
    /// Reduction of TF over this year, tCO₂ per 1000 USD.
    pub tf_decrement: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScenarioSpec {
    pub name: String,
    pub years: [YearRule; HORIZON],
}

impl ScenarioSpec {
    pub fn validate(&self) -> Result<()> {
        for rule in &self.years {
            if !(rule.tf_decrement > 0.0 && rule.tf_decrement.is_finite()) {
                return Err(Error::Config(alloc::format!(
                    "scenario {:?}: tf_decrement must be positive, got {}",
                    self.name,
                    rule.tf_decrement
                )));
            }
            match rule.pf {
                PfRule::Percentile(p) if !(0.0..=1.0).contains(&p) => {
                    return Err(Error::Config(alloc::format!(
                        "scenario {:?}: percentile {p} outside [0, 1]",
                        self.name
                    )))
                }
                PfRule::AbsoluteUsdBn(v) if !(v >= 0.0 && v.is_finite()) => {
                    return Err(Error::Config(alloc::format!(
                        "scenario {:?}: absolute PF {v} must be non-negative",
                        self.name
                    )))
                }
                _ => {}
            }
            let market = match rule.market {
                MarketRule::Baseline => 0.0,
                MarketRule::BaselineOffset(x) | MarketRule::Absolute(x) => x,
            };
            if !market.is_finite() {
                return Err(Error::Config(alloc::format!("scenario {:?}: non-finite market rule", self.name)));
            }
        }
        Ok(())
    }
}

/// Historical quantities the rules are resolved against.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScenarioContext {
    pub baseline_market: f64,
    /// Most recent losses, chronological.
    pub recent_losses: Vec<f64>,
    pub last_intensity: f64,
}

impl ScenarioContext {
    pub fn from_history(losses: &LossSeries, intensity: &IntensitySeries, market: &MarketSeries) -> Result<Self> {
        let (_, last_intensity) =
            intensity.latest().ok_or(Error::InsufficientData { what: "intensity history", needed: 1, got: 0 })?;
        Ok(Self {
            baseline_market: baseline_market_rate(market)?,
            recent_losses: losses.last_n(LOSS_WINDOW)?,
            last_intensity,
        })
    }
}

/// Mean of the trailing 10-, 15- and 20-year index CAGRs ending at the latest year.
pub fn baseline_market_rate(market: &MarketSeries) -> Result<f64> {
    let longest = BASELINE_WINDOWS[BASELINE_WINDOWS.len() - 1] as usize;
    let span = market.span().filter(|_| market.len() > longest).ok_or(Error::InsufficientData {
        what: "market history",
        needed: longest + 1,
        got: market.len(),
    })?;
    let rates = BASELINE_WINDOWS
        .iter()
        .map(|&w| cagr_between(market.levels(), span.end - w as i32, span.end))
        .collect::<Result<Vec<_>>>()?;
    mean(&rates)
}

/// `[L - d, L - 2d, ..., L - horizon·d]`; every level must stay positive.
pub fn project_tf(last_intensity: f64, decrement: f64, horizon: usize) -> Result<Vec<f64>> {
    if !(decrement > 0.0) {
        return Err(Error::OutOfRange { what: "tf decrement", value: decrement });
    }
    let out: Vec<f64> = (1..=horizon).map(|k| last_intensity - k as f64 * decrement).collect();
    if let Some(&bad) = out.iter().find(|v| !(**v > 0.0)) {
        return Err(Error::OutOfRange { what: "projected TF", value: bad });
    }
    Ok(out)
}

/// `r_f + alpha + beta_market (r_m - r_f) + beta_pf PF + beta_tf TF`
pub fn project_portfolio_return(
    fit: &FactorLoadings,
    market_return: f64,
    pf_value: f64,
    tf_value: f64,
    r_f: f64,
) -> f64 {
    r_f + fit.alpha + fit.beta_market * (market_return - r_f) + fit.beta_pf * pf_value + fit.beta_tf * tf_value
}

/// `Π(1 + r_t) - 1`, accumulated as `c + r + c·r` so a single year is returned unchanged.
pub fn cumulative_return(yearly: &[f64]) -> Result<f64> {
    if let Some(&bad) = yearly.iter().find(|r| !(**r > -1.0)) {
        return Err(Error::OutOfRange { what: "yearly return", value: bad });
    }
    Ok(yearly.iter().fold(0.0, |c, r| c + r + c * r))
}

/// `(mean(projected) - r_f) / historical_sigma`
pub fn ex_ante_sharpe(projected_yearly: &[f64], historical_sigma: f64, r_f: f64) -> Result<f64> {
    if !(historical_sigma > 0.0) {
        return Err(Error::ZeroVolatility);
    }
    Ok((mean(projected_yearly)? - r_f) / historical_sigma)
}

/// Knobs of the four default scenarios.
///
/// The high-scenario year-2 market cut, the stress year-3 market premium and
/// the stress year-3 PF percentile are toolkit defaults meant to be tuned.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct ScenarioDefaults {
    /// TF decrements for reference, mild, high and stress.
    pub tf_decrements: [f64; 4],
    pub median_percentile: f64,
    pub mild_pf_percentile: f64,
    pub high_pf_percentiles: [f64; HORIZON],
    pub stress_y1_pf_percentile: f64,
    pub stress_y2_pf_usd_bn: f64,
    pub stress_y3_pf_percentile: f64,
    /// Subtracted from the baseline in year 2 of the high scenario.
    pub high_y2_market_reduction: f64,
    pub stress_y2_market_return: f64,
    /// Added to the baseline in year 3 of the stress scenario.
    pub stress_y3_market_premium: f64,
}

impl Default for ScenarioDefaults {
    fn default() -> Self {
        Self {
            tf_decrements: [0.006, 0.008, 0.0095, 0.0105],
            median_percentile: 0.5,
            mild_pf_percentile: 0.70,
            high_pf_percentiles: [0.70, 0.85, 0.80],
            stress_y1_pf_percentile: 0.75,
            stress_y2_pf_usd_bn: 25.0,
            stress_y3_pf_percentile: 0.85,
            high_y2_market_reduction: 0.05,
            stress_y2_market_return: -0.075,
            stress_y3_market_premium: 0.02,
        }
    }
}

fn uniform(market: MarketRule, pf: [PfRule; HORIZON], tf_decrement: f64) -> [YearRule; HORIZON] {
    pf.map(|pf| YearRule { market, pf, tf_decrement })
}

/// Reference, mild, high and stress scenarios.
///
/// History requirements: at least [`LOSS_WINDOW`] losses, 21 market levels and
/// one intensity observation.
pub fn build_default_scenarios(
    losses: &LossSeries,
    intensity: &IntensitySeries,
    market: &MarketSeries,
    config: &ScenarioDefaults,
) -> Result<[ScenarioSpec; 4]> {
    let ctx = ScenarioContext::from_history(losses, intensity, market)?;
    let [d_ref, d_mild, d_high, d_stress] = config.tf_decrements;
    let median = PfRule::Percentile(config.median_percentile);
    let mild = PfRule::Percentile(config.mild_pf_percentile);

    let reference =
        ScenarioSpec { name: "reference".into(), years: uniform(MarketRule::Baseline, [median; HORIZON], d_ref) };
    let mild = ScenarioSpec { name: "mild".into(), years: uniform(MarketRule::Baseline, [median, mild, mild], d_mild) };
    let mut high = ScenarioSpec {
        name: "high".into(),
        years: uniform(MarketRule::Baseline, config.high_pf_percentiles.map(PfRule::Percentile), d_high),
    };
    high.years[1].market = MarketRule::BaselineOffset(-config.high_y2_market_reduction);
    let mut stress = ScenarioSpec {
        name: "stress".into(),
        years: uniform(
            MarketRule::Baseline,
            [
                PfRule::Percentile(config.stress_y1_pf_percentile),
                PfRule::AbsoluteUsdBn(config.stress_y2_pf_usd_bn),
                PfRule::Percentile(config.stress_y3_pf_percentile),
            ],
            d_stress,
        ),
    };
    stress.years[1].market = MarketRule::Absolute(config.stress_y2_market_return);
    stress.years[2].market = MarketRule::BaselineOffset(config.stress_y3_market_premium);

    let specs = [reference, mild, high, stress];
    for spec in &specs {
        spec.validate()?;
        resolve(spec, &ctx)?;
    }
    Ok(specs)
}

/// Predictor values for one projected year.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ResolvedYear {
    pub market_return: f64,
    pub pf: f64,
    pub tf: f64,
}

/// Turns a spec's rules into numbers. TF is the last observed intensity
/// minus the cumulative decrements.
pub fn resolve(spec: &ScenarioSpec, ctx: &ScenarioContext) -> Result<[ResolvedYear; HORIZON]> {
    spec.validate()?;
    let mut tf = ctx.last_intensity;
    let mut out = [ResolvedYear { market_return: 0.0, pf: 0.0, tf: 0.0 }; HORIZON];
    for (slot, rule) in out.iter_mut().zip(&spec.years) {
        tf -= rule.tf_decrement;
        if !(tf > 0.0) {
            return Err(Error::OutOfRange { what: "projected TF", value: tf });
        }
        let market_return = match rule.market {
            MarketRule::Baseline => ctx.baseline_market,
            MarketRule::BaselineOffset(x) => ctx.baseline_market + x,
            MarketRule::Absolute(x) => x,
        };
        let pf = match rule.pf {
            PfRule::Percentile(p) => percentile(&ctx.recent_losses, p)?,
            PfRule::AbsoluteUsdBn(v) => v,
        };
        *slot = ResolvedYear { market_return, pf, tf };
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HistoricalSigmas {
    pub portfolio: f64,
    pub market: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ProjectedYear {
    /// 1-based offset from the last data year.
    pub offset: usize,
    pub market_return: f64,
    pub pf: f64,
    pub tf: f64,
    pub portfolio_return: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScenarioProjection {
    pub name: String,
    pub years: Vec<ProjectedYear>,
    pub cumulative_3y_portfolio: f64,
    pub cumulative_3y_market: f64,
    pub ex_ante_sharpe_portfolio: f64,
    pub ex_ante_sharpe_market: f64,
}

impl ScenarioProjection {
    /// Portfolio minus market cumulative return.
    pub fn cumulative_gap(&self) -> f64 {
        self.cumulative_3y_portfolio - self.cumulative_3y_market
    }
}

/// Projects portfolio and market side by side for each spec, in input order.
///
/// Market returns come straight from each spec's market rule; portfolio
/// returns go through the fitted loadings. Each series uses its own
/// historical volatility for the ex-ante Sharpe ratio.
pub fn run_scenarios(
    fit: &FactorLoadings,
    specs: &[ScenarioSpec],
    ctx: &ScenarioContext,
    r_f: f64,
    sigmas: HistoricalSigmas,
) -> Result<Vec<ScenarioProjection>> {
    specs
        .iter()
        .map(|spec| {
            let resolved = resolve(spec, ctx)?;
            let years: Vec<ProjectedYear> = resolved
                .iter()
                .enumerate()
                .map(|(i, y)| ProjectedYear {
                    offset: i + 1,
                    market_return: y.market_return,
                    pf: y.pf,
                    tf: y.tf,
                    portfolio_return: project_portfolio_return(fit, y.market_return, y.pf, y.tf, r_f),
                })
                .collect();
            let port: Vec<f64> = years.iter().map(|y| y.portfolio_return).collect();
            let mkt: Vec<f64> = years.iter().map(|y| y.market_return).collect();
            Ok(ScenarioProjection {
                name: spec.name.clone(),
                cumulative_3y_portfolio: cumulative_return(&port)?,
                cumulative_3y_market: cumulative_return(&mkt)?,
                ex_ante_sharpe_portfolio: ex_ante_sharpe(&port, sigmas.portfolio, r_f)?,
                ex_ante_sharpe_market: ex_ante_sharpe(&mkt, sigmas.market, r_f)?,
                years,
            })
        })
        .collect()
}
