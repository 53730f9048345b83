//! Statistical kernels shared by the other modules.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::data::{AssetRecord, MarketSeries, Year, YearSpan};
use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Aligned simple annual returns: one row per year, one column per asset.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnPanel {
    years: Vec<Year>,
    tickers: Vec<String>,
    asset_returns: Matrix,
    market_returns: Vec<f64>,
}

impl ReturnPanel {
    pub fn new(
        years: Vec<Year>,
        tickers: Vec<String>,
        asset_returns: Matrix,
        market_returns: Vec<f64>,
    ) -> Result<Self> {
        if asset_returns.rows() != years.len() {
            return Err(Error::DimensionMismatch { expected: years.len(), got: asset_returns.rows() });
        }
        if asset_returns.cols() != tickers.len() {
            return Err(Error::DimensionMismatch { expected: tickers.len(), got: asset_returns.cols() });
        }
        if market_returns.len() != years.len() {
            return Err(Error::DimensionMismatch { expected: years.len(), got: market_returns.len() });
        }
        if let Some(&bad) =
            asset_returns.as_slice().iter().chain(&market_returns).find(|r| !(**r > -1.0 && r.is_finite()))
        {
            return Err(Error::OutOfRange { what: "simple return", value: bad });
        }
        Ok(Self { years, tickers, asset_returns, market_returns })
    }

    /// Builds the panel for `span` from year-end prices. The first year of
    /// the span only anchors the first return.
    pub fn from_prices(assets: &[AssetRecord], market: &MarketSeries, span: YearSpan) -> Result<Self> {
        if span.len() < 2 {
            return Err(Error::InsufficientData { what: "return panel years", needed: 2, got: span.len() });
        }
        let years: Vec<Year> = span.years().skip(1).collect();
        let mut columns = Vec::with_capacity(assets.len());
        for asset in assets {
            let restricted = asset.restricted_to(span)?;
            columns.push(simple_returns(restricted.prices())?);
        }
        let market_levels: BTreeMap<Year, f64> = span
            .years()
            .map(|y| {
                market
                    .level(y)
                    .map(|l| (y, l))
                    .ok_or_else(|| Error::MissingYears { what: "market".into(), years: alloc::vec![y] })
            })
            .collect::<Result<_>>()?;
        let market_returns: Vec<f64> = simple_returns(&market_levels)?.into_values().collect();

        let mut data = Vec::with_capacity(years.len() * assets.len());
        for y in &years {
            data.extend(columns.iter().map(|c| c[y]));
        }
        let asset_returns = Matrix::from_row_major(years.len(), assets.len(), data)?;
        let tickers = assets.iter().map(|a| a.ticker().into()).collect();
        Self::new(years, tickers, asset_returns, market_returns)
    }

    pub fn years(&self) -> &[Year] {
        &self.years
    }

    pub fn tickers(&self) -> &[String] {
        &self.tickers
    }

    pub fn asset_returns(&self) -> &Matrix {
        &self.asset_returns
    }

    pub fn market_returns(&self) -> &[f64] {
        &self.market_returns
    }

    pub fn n_years(&self) -> usize {
        self.years.len()
    }

    pub fn n_assets(&self) -> usize {
        self.tickers.len()
    }
}

/// `price(y) / price(y-1) - 1` for each consecutive pair of years.
pub fn simple_returns(series: &BTreeMap<Year, f64>) -> Result<BTreeMap<Year, f64>> {
    if series.len() < 2 {
        return Err(Error::InsufficientData { what: "price series", needed: 2, got: series.len() });
    }
    let mut out = BTreeMap::new();
    for ((&y0, &p0), (&y1, &p1)) in series.iter().zip(series.iter().skip(1)) {
        if y1 != y0 + 1 {
            return Err(Error::NonContiguous { what: "price series".into(), year: y0 + 1 });
        }
        if !(p0 > 0.0 && p1 > 0.0) {
            return Err(Error::OutOfRange { what: "price", value: if p0 > 0.0 { p1 } else { p0 } });
        }
        out.insert(y1, p1 / p0 - 1.0);
    }
    Ok(out)
}

/// Compound annual growth rate, `(end/start)^(1/years) - 1`.
pub fn cagr(start_price: f64, end_price: f64, years: u32) -> Result<f64> {
    if !(start_price > 0.0) {
        return Err(Error::OutOfRange { what: "start price", value: start_price });
    }
    if !(end_price > 0.0) {
        return Err(Error::OutOfRange { what: "end price", value: end_price });
    }
    if years == 0 {
        return Err(Error::OutOfRange { what: "CAGR years", value: 0.0 });
    }
    Ok(libm::pow(end_price / start_price, 1.0 / f64::from(years)) - 1.0)
}

/// CAGR between two years of a price map.
pub fn cagr_between(series: &BTreeMap<Year, f64>, from: Year, to: Year) -> Result<f64> {
    let missing: Vec<Year> = [from, to].into_iter().filter(|y| !series.contains_key(y)).collect();
    if !missing.is_empty() {
        return Err(Error::MissingYears { what: "CAGR endpoints".into(), years: missing });
    }
    let years =
        u32::try_from(to - from).map_err(|_| Error::OutOfRange { what: "CAGR years", value: f64::from(to - from) })?;
    cagr(series[&from], series[&to], years)
}

pub fn excess_over_market(asset_cagr: f64, market_cagr: f64) -> f64 {
    asset_cagr - market_cagr
}

/// Arithmetic mean of each asset column.
pub fn mean_vector(panel: &ReturnPanel) -> Result<Vec<f64>> {
    let n = panel.n_years();
    if n == 0 {
        return Err(Error::InsufficientData { what: "mean vector", needed: 1, got: 0 });
    }
    let r = panel.asset_returns();
    let mut sums = alloc::vec![0.0; panel.n_assets()];
    for i in 0..n {
        for (s, x) in sums.iter_mut().zip(r.row(i)) {
            *s += x;
        }
    }
    Ok(sums.into_iter().map(|s| s / n as f64).collect())
}

/// Sample covariance (denominator `n - 1`), two-pass.
///
/// Only the lower triangle is computed and mirrored, so the result is
/// exactly symmetric.
pub fn covariance_matrix(panel: &ReturnPanel) -> Result<Matrix> {
    let n = panel.n_years();
    if n < 2 {
        return Err(Error::InsufficientData { what: "covariance", needed: 2, got: n });
    }
    let means = mean_vector(panel)?;
    let k = panel.n_assets();
    let r = panel.asset_returns();
    let mut cov = Matrix::zeros(k, k);
    for a in 0..k {
        for b in 0..=a {
            let s: f64 = (0..n).map(|t| (r[(t, a)] - means[a]) * (r[(t, b)] - means[b])).sum();
            let c = s / (n - 1) as f64;
            cov[(a, b)] = c;
            cov[(b, a)] = c;
        }
    }
    Ok(cov)
}

pub fn mean(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::InsufficientData { what: "mean", needed: 1, got: 0 });
    }
    Ok(values.iter().sum::<f64>() / values.len() as f64)
}

/// Sample standard deviation (denominator `n - 1`).
pub fn sample_std(values: &[f64]) -> Result<f64> {
    if values.len() < 2 {
        return Err(Error::InsufficientData { what: "standard deviation", needed: 2, got: values.len() });
    }
    let m = mean(values)?;
    let ss: f64 = values.iter().map(|v| (v - m) * (v - m)).sum();
    Ok(libm::sqrt(ss / (values.len() - 1) as f64))
}

/// Percentile with linear interpolation between order statistics:
/// `h = p·(n-1)`, result `v[⌊h⌋] + (h-⌊h⌋)·(v[⌊h⌋+1] - v[⌊h⌋])`.
pub fn percentile(values: &[f64], p: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::InsufficientData { what: "percentile", needed: 1, got: 0 });
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::OutOfRange { what: "percentile", value: p });
    }
    if let Some(&bad) = values.iter().find(|v| v.is_nan()) {
        return Err(Error::OutOfRange { what: "percentile input", value: bad });
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let h = p * (sorted.len() - 1) as f64;
    let lo = libm::floor(h) as usize;
    if lo + 1 >= sorted.len() {
        return Ok(sorted[sorted.len() - 1]);
    }
    Ok(sorted[lo] + (h - lo as f64) * (sorted[lo + 1] - sorted[lo]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::CapClass;
    use alloc::vec;

    fn panel(cols: &[&[f64]]) -> ReturnPanel {
        let n = cols[0].len();
        let mut data = Vec::new();
        for t in 0..n {
            data.extend(cols.iter().map(|c| c[t]));
        }
        let m = Matrix::from_row_major(n, cols.len(), data).unwrap();
        let tickers = (0..cols.len()).map(|i| alloc::format!("A{i}")).collect();
        ReturnPanel::new((0..n as Year).collect(), tickers, m, vec![0.0; n]).unwrap()
    }

    #[test]
    fn simple_returns_cases() {
        let r = simple_returns(&BTreeMap::from([(1999, 100.0), (2000, 110.0)])).unwrap();
        assert!((r[&2000] - 0.10).abs() < 1e-15);
        let flat = simple_returns(&BTreeMap::from([(1, 50.0), (2, 50.0), (3, 50.0)])).unwrap();
        assert!(flat.values().all(|v| *v == 0.0));
        assert!(simple_returns(&BTreeMap::from([(1999, 100.0)])).is_err());
    }

    #[test]
    fn cagr_cases() {
        assert_eq!(cagr(100.0, 100.0, 10).unwrap(), 0.0);
        // 2^(1/24) - 1 = 0.029302236643492...
        assert!((cagr(100.0, 200.0, 24).unwrap() - 0.029_302_236_643_492).abs() < 1e-6);
        assert_eq!(cagr(100.0, 50.0, 1).unwrap(), -0.5);
        assert!(cagr(0.0, 50.0, 1).is_err());
        assert!(cagr(10.0, 50.0, 0).is_err());
    }

    #[test]
    fn mean_vector_cases() {
        assert_eq!(mean_vector(&panel(&[&[0.1, 0.3]])).unwrap(), vec![0.2]);
        assert_eq!(mean_vector(&panel(&[&[0.05], &[-0.2]])).unwrap(), vec![0.05, -0.2]);
    }

    #[test]
    fn covariance_cases() {
        let x = [0.1, -0.2, 0.05, 0.3];
        let c = covariance_matrix(&panel(&[&x, &x])).unwrap();
        let m = x.iter().sum::<f64>() / 4.0;
        let var = x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / 3.0;
        assert!((c[(0, 0)] - var).abs() < 1e-15);
        assert_eq!(c[(0, 1)], c[(0, 0)]);
        assert!(covariance_matrix(&panel(&[&[0.1]])).is_err());
    }

    #[test]
    fn percentile_cases() {
        assert_eq!(percentile(&[5.0, 1.0, 3.0], 0.5).unwrap(), 3.0);
        let ten: Vec<f64> = (1..=10).map(f64::from).collect();
        // h = 0.7 * 9 = 6.3 → v[6] + 0.3 (v[7] - v[6]) = 7 + 0.3
        assert!((percentile(&ten, 0.70).unwrap() - 7.3).abs() < 1e-12);
        assert_eq!(percentile(&[4.0, 9.0, -1.0], 1.0).unwrap(), 9.0);
        assert_eq!(percentile(&[4.0, 9.0, -1.0], 0.0).unwrap(), -1.0);
        assert!(percentile(&[], 0.5).is_err());
        assert!(percentile(&[1.0], 1.5).is_err());
    }

    #[test]
    fn excess_cases() {
        assert_eq!(excess_over_market(0.12, 0.12), 0.0);
        assert!((excess_over_market(0.15, 0.10) - 0.05).abs() < 1e-15);
        assert!((excess_over_market(0.05, 0.10) + 0.05).abs() < 1e-15);
    }

    #[test]
    fn panel_from_prices() {
        let a = AssetRecord::new("A", "a", CapClass::Large, 50.0, [(2000, 10.0), (2001, 11.0), (2002, 9.9)]).unwrap();
        let m = MarketSeries::new([(2000, 100.0), (2001, 120.0), (2002, 90.0)]).unwrap();
        let p = ReturnPanel::from_prices(&[a], &m, YearSpan::new(2000, 2002).unwrap()).unwrap();
        assert_eq!(p.years(), &[2001, 2002]);
        assert!((p.asset_returns()[(1, 0)] + 0.1).abs() < 1e-12);
        assert!((p.market_returns()[1] + 0.25).abs() < 1e-12);
    }
}
