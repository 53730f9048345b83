use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use crate::data::{IntensitySeries, LossSeries, Year};
use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Fewest common years accepted for the four-coefficient regression.
pub const MIN_REGRESSION_YEARS: usize = 6;

/// Regression inputs on the years shared by every series.
#[derive(Debug, Clone, PartialEq)]
pub struct Design {
    pub years: Vec<Year>,
    /// `r_V(t) - r_f`
    pub response: Vec<f64>,
    /// Columns: `1`, `r_m(t) - r_f`, `PF(t)`, `TF(t)`.
    pub matrix: Matrix,
}

/// Builds the response and design matrix on the intersection of years.
///
/// PF and TF enter as levels (USD bn and tCO₂ per 1000 USD).
pub fn assemble_design(
    portfolio_returns: &BTreeMap<Year, f64>,
    market_returns: &BTreeMap<Year, f64>,
    losses: &LossSeries,
    intensity: &IntensitySeries,
    r_f: f64,
) -> Result<Design> {
    let covered = |y: &Year| market_returns.contains_key(y) && losses.get(*y).is_some() && intensity.get(*y).is_some();
    let years: Vec<Year> = portfolio_returns.keys().copied().filter(|y| covered(y)).collect();
    if years.len() < MIN_REGRESSION_YEARS {
        let missing: BTreeSet<Year> = portfolio_returns.keys().copied().filter(|y| !covered(y)).collect();
        if !missing.is_empty() {
            return Err(Error::MissingYears {
                what: "regression inputs (market, losses or intensity)".into(),
                years: missing.into_iter().collect(),
            });
        }
        return Err(Error::InsufficientData {
            what: "regression years",
            needed: MIN_REGRESSION_YEARS,
            got: years.len(),
        });
    }
    let mut response = Vec::with_capacity(years.len());
    let mut data = Vec::with_capacity(years.len() * 4);
    for &y in &years {
        response.push(portfolio_returns[&y] - r_f);
        data.extend([
            1.0,
            market_returns[&y] - r_f,
            losses.get(y).expect("covered"),
            intensity.get(y).expect("covered"),
        ]);
    }
    let matrix = Matrix::from_row_major(years.len(), 4, data)?;
    Ok(Design { years, response, matrix })
}
