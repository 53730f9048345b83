//! Validated input series and year alignment.
//!
//! All series are annual and keyed by calendar year. Constructors enforce the
//! invariants of each type, so a value of any of these types is always valid.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};

pub type Year = i32;

/// Market-capitalization bucket. Supplied as input data, never computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum CapClass {
    Large,
    Mid,
    Small,
}

impl CapClass {
    pub const ALL: [CapClass; 3] = [CapClass::Large, CapClass::Mid, CapClass::Small];

    pub fn as_str(self) -> &'static str {
        match self {
            CapClass::Large => "large",
            CapClass::Mid => "mid",
            CapClass::Small => "small",
        }
    }
}

impl fmt::Display for CapClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CapClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "large" => Ok(CapClass::Large),
            "mid" => Ok(CapClass::Mid),
            "small" => Ok(CapClass::Small),
            other => Err(Error::Config(alloc::format!("unknown cap class {other:?}"))),
        }
    }
}

/// Inclusive range of calendar years.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct YearSpan {
    pub start: Year,
    pub end: Year,
}

impl YearSpan {
    pub fn new(start: Year, end: Year) -> Result<Self> {
        if start > end {
            return Err(Error::Config(alloc::format!("empty year span {start}-{end}")));
        }
        Ok(Self { start, end })
    }

    pub fn years(self) -> impl DoubleEndedIterator<Item = Year> + Clone {
        self.start..=self.end
    }

    pub fn len(self) -> usize {
        (self.end - self.start + 1) as usize
    }

    pub fn is_empty(self) -> bool {
        false
    }

    pub fn contains(self, year: Year) -> bool {
        (self.start..=self.end).contains(&year)
    }
}

fn check_contiguous(what: &str, series: &BTreeMap<Year, f64>) -> Result<()> {
    for (prev, next) in series.keys().zip(series.keys().skip(1)) {
        if *next != prev + 1 {
            return Err(Error::NonContiguous { what: what.to_string(), year: prev + 1 });
        }
    }
    Ok(())
}

fn collect_unique(what: &str, entries: impl IntoIterator<Item = (Year, f64)>) -> Result<BTreeMap<Year, f64>> {
    let mut out = BTreeMap::new();
    for (year, value) in entries {
        if out.insert(year, value).is_some() {
            return Err(Error::NonContiguous { what: alloc::format!("{what} (duplicate year)"), year });
        }
    }
    Ok(out)
}

/// One asset's identity, environmental score and annual year-end closes.
#[derive(Debug, Clone, PartialEq)]
pub struct AssetRecord {
    ticker: String,
    name: String,
    cap_class: CapClass,
    env_score: f64,
    prices: BTreeMap<Year, f64>,
    sector: Option<String>,
}

impl AssetRecord {
    pub fn new(
        ticker: impl Into<String>,
        name: impl Into<String>,
        cap_class: CapClass,
        env_score: f64,
        prices: impl IntoIterator<Item = (Year, f64)>,
    ) -> Result<Self> {
        let ticker = ticker.into();
        if !(0.0..=100.0).contains(&env_score) {
            return Err(Error::OutOfRange { what: "env_score", value: env_score });
        }
        let prices = collect_unique(&ticker, prices)?;
        if prices.is_empty() {
            return Err(Error::InsufficientData { what: "asset prices", needed: 1, got: 0 });
        }
        if let Some(&bad) = prices.values().find(|p| !(**p > 0.0 && p.is_finite())) {
            return Err(Error::OutOfRange { what: "close price", value: bad });
        }
        check_contiguous(&ticker, &prices)?;
        Ok(Self { ticker, name: name.into(), cap_class, env_score, prices, sector: None })
    }

    pub fn with_sector(mut self, sector: impl Into<String>) -> Self {
        self.sector = Some(sector.into());
        self
    }

    pub fn ticker(&self) -> &str {
        &self.ticker
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn cap_class(&self) -> CapClass {
        self.cap_class
    }

    pub fn env_score(&self) -> f64 {
        self.env_score
    }

    pub fn sector(&self) -> Option<&str> {
        self.sector.as_deref()
    }

    pub fn prices(&self) -> &BTreeMap<Year, f64> {
        &self.prices
    }

    pub fn price(&self, year: Year) -> Option<f64> {
        self.prices.get(&year).copied()
    }

    pub fn span(&self) -> YearSpan {
        let start = *self.prices.keys().next().expect("non-empty by construction");
        let end = *self.prices.keys().next_back().expect("non-empty by construction");
        YearSpan { start, end }
    }

    pub fn covers(&self, span: YearSpan) -> bool {
        let own = self.span();
        own.start <= span.start && own.end >= span.end
    }

    /// Copy of this record restricted to `span`. Fails if any year is missing.
    pub fn restricted_to(&self, span: YearSpan) -> Result<Self> {
        let missing: Vec<Year> = span.years().filter(|y| !self.prices.contains_key(y)).collect();
        if !missing.is_empty() {
            return Err(Error::MissingYears { what: self.ticker.clone(), years: missing });
        }
        let mut out = self.clone();
        out.prices.retain(|y, _| span.contains(*y));
        Ok(out)
    }
}

/// Total reported economic damage from natural disasters per year, USD billions.
#[derive(Debug, Clone, PartialEq)]
pub struct LossSeries {
    entries: BTreeMap<Year, f64>,
}

impl LossSeries {
    pub fn new(entries: impl IntoIterator<Item = (Year, f64)>) -> Result<Self> {
        let entries = collect_unique("losses", entries)?;
        if let Some(&bad) = entries.values().find(|d| !(**d >= 0.0 && d.is_finite())) {
            return Err(Error::OutOfRange { what: "damage_usd_bn", value: bad });
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &BTreeMap<Year, f64> {
        &self.entries
    }

    pub fn get(&self, year: Year) -> Option<f64> {
        self.entries.get(&year).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The most recent `n` observations in chronological order.
    pub fn last_n(&self, n: usize) -> Result<Vec<f64>> {
        if self.entries.len() < n {
            return Err(Error::InsufficientData { what: "loss history", needed: n, got: self.entries.len() });
        }
        let skip = self.entries.len() - n;
        Ok(self.entries.values().skip(skip).copied().collect())
    }
}

/// CO₂ emissions intensity of GDP, tCO₂ per 1000 USD.
#[derive(Debug, Clone, PartialEq)]
pub struct IntensitySeries {
    entries: BTreeMap<Year, f64>,
}

impl IntensitySeries {
    pub fn new(entries: impl IntoIterator<Item = (Year, f64)>) -> Result<Self> {
        let entries = collect_unique("intensity", entries)?;
        if let Some(&bad) = entries.values().find(|v| !(**v > 0.0 && v.is_finite())) {
            return Err(Error::OutOfRange { what: "tco2_per_kusd", value: bad });
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &BTreeMap<Year, f64> {
        &self.entries
    }

    pub fn get(&self, year: Year) -> Option<f64> {
        self.entries.get(&year).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn latest(&self) -> Option<(Year, f64)> {
        self.entries.iter().next_back().map(|(y, v)| (*y, *v))
    }
}

/// Market index levels, contiguous years.
#[derive(Debug, Clone, PartialEq)]
pub struct MarketSeries {
    index_levels: BTreeMap<Year, f64>,
}

impl MarketSeries {
    pub fn new(entries: impl IntoIterator<Item = (Year, f64)>) -> Result<Self> {
        let index_levels = collect_unique("market", entries)?;
        if let Some(&bad) = index_levels.values().find(|v| !(**v > 0.0 && v.is_finite())) {
            return Err(Error::OutOfRange { what: "index_level", value: bad });
        }
        check_contiguous("market", &index_levels)?;
        Ok(Self { index_levels })
    }

    pub fn levels(&self) -> &BTreeMap<Year, f64> {
        &self.index_levels
    }

    pub fn level(&self, year: Year) -> Option<f64> {
        self.index_levels.get(&year).copied()
    }

    pub fn len(&self) -> usize {
        self.index_levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index_levels.is_empty()
    }

    pub fn span(&self) -> Option<YearSpan> {
        let start = *self.index_levels.keys().next()?;
        let end = *self.index_levels.keys().next_back()?;
        Some(YearSpan { start, end })
    }
}

/// Result of [`align_years`]: assets covering the span, and those that do not.
#[derive(Debug, Clone, PartialEq)]
pub struct Alignment {
    pub span: YearSpan,
    /// Retained assets, in input order, restricted to `span`.
    pub retained: Vec<AssetRecord>,
    /// Tickers with the years they are missing inside `span`.
    pub dropped: Vec<(String, Vec<Year>)>,
}

/// Keeps the assets that have a price for every year of `span`.
///
/// The market must cover the span. Assets with gaps are reported in
/// [`Alignment::dropped`], never silently discarded.
pub fn align_years(assets: &[AssetRecord], market: &MarketSeries, span: YearSpan) -> Result<Alignment> {
    let market_missing: Vec<Year> = span.years().filter(|y| market.level(*y).is_none()).collect();
    if !market_missing.is_empty() {
        return Err(Error::MissingYears { what: "market".to_string(), years: market_missing });
    }
    let mut retained = Vec::new();
    let mut dropped = Vec::new();
    for asset in assets {
        match asset.restricted_to(span) {
            Ok(a) => retained.push(a),
            Err(Error::MissingYears { years, .. }) => dropped.push((asset.ticker.clone(), years)),
            Err(e) => return Err(e),
        }
    }
    if retained.is_empty() {
        return Err(Error::NoCoverage { start: span.start, end: span.end });
    }
    Ok(Alignment { span, retained, dropped })
}

/// Rejects duplicate tickers.
pub fn check_unique_tickers(assets: &[AssetRecord]) -> Result<()> {
    let mut seen = BTreeMap::new();
    for a in assets {
        if seen.insert(a.ticker(), ()).is_some() {
            return Err(Error::DuplicateTicker(a.ticker.clone()));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn asset(ticker: &str, years: impl IntoIterator<Item = Year>) -> AssetRecord {
        AssetRecord::new(ticker, ticker, CapClass::Large, 50.0, years.into_iter().map(|y| (y, 10.0))).unwrap()
    }

    fn market(span: YearSpan) -> MarketSeries {
        MarketSeries::new(span.years().map(|y| (y, 100.0))).unwrap()
    }

    #[test]
    fn env_score_bounds() {
        let err = AssetRecord::new("X", "X", CapClass::Mid, 120.0, [(2000, 1.0)]).unwrap_err();
        assert!(matches!(err, Error::OutOfRange { what: "env_score", .. }));
        assert!(AssetRecord::new("X", "X", CapClass::Mid, 100.0, [(2000, 1.0)]).is_ok());
        assert!(AssetRecord::new("X", "X", CapClass::Mid, 0.0, [(2000, 1.0)]).is_ok());
    }

    #[test]
    fn prices_must_be_positive_and_contiguous() {
        assert!(AssetRecord::new("X", "X", CapClass::Mid, 50.0, [(2000, 0.0)]).is_err());
        let gap = AssetRecord::new("X", "X", CapClass::Mid, 50.0, [(2000, 1.0), (2002, 1.0)]);
        assert_eq!(gap.unwrap_err(), Error::NonContiguous { what: "X".into(), year: 2001 });
    }

    #[test]
    fn loss_and_intensity_bounds() {
        assert!(LossSeries::new([(2000, -1.0)]).is_err());
        assert!(LossSeries::new([(2000, 0.0)]).is_ok());
        assert!(IntensitySeries::new([(2000, 0.0)]).is_err());
        assert!(MarketSeries::new([(2000, -3.0)]).is_err());
        let losses = LossSeries::new((2013..=2022).map(|y| (y, 1.0))).unwrap();
        assert_eq!(losses.len(), 10);
    }

    #[test]
    fn align_reports_assets_with_gaps() {
        let span = YearSpan::new(1999, 2023).unwrap();
        let gappy = AssetRecord::new("GAP", "gap", CapClass::Small, 40.0, (2002..=2023).map(|y| (y, 5.0))).unwrap();
        let assets = vec![asset("A", 1999..=2023), gappy, asset("B", 1995..=2024)];
        let al = align_years(&assets, &market(span), span).unwrap();
        let kept: Vec<_> = al.retained.iter().map(AssetRecord::ticker).collect();
        assert_eq!(kept, ["A", "B"]);
        assert_eq!(al.dropped, vec![("GAP".into(), vec![1999, 2000, 2001])]);
        assert_eq!(al.retained[1].span(), span);
    }

    #[test]
    fn align_identity_when_all_cover() {
        let span = YearSpan::new(2000, 2005).unwrap();
        let assets = vec![asset("A", 2000..=2005), asset("B", 2000..=2005)];
        let al = align_years(&assets, &market(span), span).unwrap();
        assert_eq!(al.retained, assets);
        assert!(al.dropped.is_empty());
    }

    #[test]
    fn align_empty_intersection_errors() {
        let span = YearSpan::new(1999, 2023).unwrap();
        let assets = vec![asset("A", 2005..=2023)];
        assert_eq!(
            align_years(&assets, &market(span), span).unwrap_err(),
            Error::NoCoverage { start: 1999, end: 2023 }
        );
    }

    #[test]
    fn duplicate_tickers() {
        let assets = vec![asset("TCS", 2000..=2001), asset("TCS", 2000..=2001)];
        assert_eq!(check_unique_tickers(&assets).unwrap_err(), Error::DuplicateTicker("TCS".into()));
    }
}
