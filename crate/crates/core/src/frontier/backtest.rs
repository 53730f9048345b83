use alloc::vec::Vec;

use crate::data::{AssetRecord, MarketSeries, Year, YearSpan};
use crate::error::{Error, Result};

/// Starting portfolio value in currency units.
pub const DEFAULT_INITIAL_VALUE: f64 = 100.0;

/// Holdings and value at one year end.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ValuationSnapshot {
    pub year: Year,
    /// Units held of each asset, fixed at the start of the backtest.
    pub units: Vec<f64>,
    pub prices: Vec<f64>,
    pub value: f64,
}

impl ValuationSnapshot {
    /// `x_i · S_i / V`
    pub fn implied_weights(&self) -> Vec<f64> {
        self.units.iter().zip(&self.prices).map(|(x, s)| x * s / self.value).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Backtest {
    pub snapshots: Vec<ValuationSnapshot>,
    /// `(year, portfolio return, market return)` from the second year on.
    pub returns: Vec<(Year, f64, Option<f64>)>,
}

impl Backtest {
    pub fn portfolio_returns(&self) -> impl Iterator<Item = (Year, f64)> + '_ {
        self.returns.iter().map(|(y, r, _)| (*y, *r))
    }
}

/// Buy-and-hold valuation over `span`.
///
/// Units are `x_i = w_i · V(0) / S_i(start)` and never rebalanced. When a
/// market series is given, its simple returns are carried alongside.
pub fn backtest(
    weights: &[f64],
    assets: &[AssetRecord],
    span: YearSpan,
    initial_value: f64,
    market: Option<&MarketSeries>,
) -> Result<Backtest> {
    if weights.len() != assets.len() {
        return Err(Error::DimensionMismatch { expected: assets.len(), got: weights.len() });
    }
    if !(initial_value > 0.0 && initial_value.is_finite()) {
        return Err(Error::OutOfRange { what: "initial value", value: initial_value });
    }
    if let Some(&w) = weights.iter().find(|w| !(**w >= 0.0)) {
        return Err(Error::OutOfRange { what: "portfolio weight", value: w });
    }
    let restricted = assets.iter().map(|a| a.restricted_to(span)).collect::<Result<Vec<_>>>()?;

    let start_prices: Vec<f64> = restricted.iter().map(|a| a.prices()[&span.start]).collect();
    let units: Vec<f64> = weights.iter().zip(&start_prices).map(|(w, s)| w * initial_value / s).collect();

    let mut snapshots: Vec<ValuationSnapshot> = Vec::with_capacity(span.len());
    for year in span.years() {
        let prices: Vec<f64> = restricted.iter().map(|a| a.prices()[&year]).collect();
        let value =
            if year == span.start { initial_value } else { units.iter().zip(&prices).map(|(x, s)| x * s).sum() };
        snapshots.push(ValuationSnapshot { year, units: units.clone(), prices, value });
    }

    let returns = snapshots
        .windows(2)
        .map(|w| {
            let year = w[1].year;
            let market_return = market.and_then(|m| Some(m.level(year)? / m.level(year - 1)? - 1.0));
            (year, w[1].value / w[0].value - 1.0, market_return)
        })
        .collect();
    Ok(Backtest { snapshots, returns })
}
