//! Screening of the loaded assets into the investable universe.
//!
//! Assets at or below the environmental-score floor are dropped. Within each
//! cap class the survivors are ranked by the average of their per-metric ranks
//! (rank 1 = best, ties share the mean rank) and the top `quota[class]` kept.
//! Composite ties go to the higher environmental score, then the smaller ticker.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::analytics::{cagr_between, excess_over_market};
use crate::data::{AssetRecord, CapClass, MarketSeries};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum RankingMetric {
    /// CAGR over the full aligned span.
    LongCagr,
    /// CAGR over the trailing `short_window` years.
    ShortCagr,
    /// Long CAGR minus the market's long CAGR.
    ExcessOverMarket,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct ScreeningConfig {
    /// Exclusive lower bound on the environmental score.
    pub min_env_score: f64,
    pub quota: BTreeMap<CapClass, usize>,
    pub ranking_metrics: Vec<RankingMetric>,
    pub short_window: u32,
}

impl Default for ScreeningConfig {
    fn default() -> Self {
        Self {
            min_env_score: 35.0,
            quota: BTreeMap::from([(CapClass::Large, 15), (CapClass::Mid, 6), (CapClass::Small, 4)]),
            ranking_metrics: vec![RankingMetric::LongCagr, RankingMetric::ShortCagr, RankingMetric::ExcessOverMarket],
            short_window: 3,
        }
    }
}

impl ScreeningConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=100.0).contains(&self.min_env_score) {
            return Err(Error::Config(alloc::format!("min_env_score {} outside [0, 100]", self.min_env_score)));
        }
        if self.short_window == 0 {
            return Err(Error::Config("short_window must be at least 1".into()));
        }
        Ok(())
    }

    pub fn total_quota(&self) -> usize {
        self.quota.values().sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ScreeningMetrics {
    pub long_cagr: f64,
    pub short_cagr: f64,
    pub excess_over_market: f64,
}

impl ScreeningMetrics {
    fn get(&self, metric: RankingMetric) -> f64 {
        match metric {
            RankingMetric::LongCagr => self.long_cagr,
            RankingMetric::ShortCagr => self.short_cagr,
            RankingMetric::ExcessOverMarket => self.excess_over_market,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankedAsset {
    pub asset: AssetRecord,
    pub metrics: ScreeningMetrics,
    /// Mean of the per-metric ranks within the cap class; lower is better.
    pub composite_rank: f64,
}

pub fn screening_metrics(asset: &AssetRecord, market: &MarketSeries, short_window: u32) -> Result<ScreeningMetrics> {
    let span = asset.span();
    let long_cagr = cagr_between(asset.prices(), span.start, span.end)?;
    let short_start = span.end - short_window as i32;
    let short_cagr = cagr_between(asset.prices(), short_start, span.end)?;
    let market_cagr = cagr_between(market.levels(), span.start, span.end)?;
    Ok(ScreeningMetrics { long_cagr, short_cagr, excess_over_market: excess_over_market(long_cagr, market_cagr) })
}

/// Ranks (1 = largest value); equal values share their mean rank.
fn descending_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let shared = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = shared;
        }
        i = j + 1;
    }
    ranks
}

fn by_rank(a: &RankedAsset, b: &RankedAsset) -> Ordering {
    a.composite_rank
        .total_cmp(&b.composite_rank)
        .then_with(|| b.asset.env_score().total_cmp(&a.asset.env_score()))
        .then_with(|| a.asset.ticker().cmp(b.asset.ticker()))
}

/// Applies the environmental floor and per-class quotas.
///
/// Output is ordered by cap class (large, mid, small) and then by rank.
pub fn screen(assets: &[AssetRecord], config: &ScreeningConfig, market: &MarketSeries) -> Result<Vec<RankedAsset>> {
    config.validate()?;
    let mut out = Vec::with_capacity(config.total_quota());
    for class in CapClass::ALL {
        let wanted = config.quota.get(&class).copied().unwrap_or(0);
        let candidates: Vec<&AssetRecord> =
            assets.iter().filter(|a| a.cap_class() == class && a.env_score() > config.min_env_score).collect();
        if candidates.len() < wanted {
            return Err(Error::QuotaShortfall { class: class.as_str(), wanted, available: candidates.len() });
        }
        if wanted == 0 {
            continue;
        }
        let metrics =
            candidates.iter().map(|a| screening_metrics(a, market, config.short_window)).collect::<Result<Vec<_>>>()?;
        let mut composite = vec![0.0; candidates.len()];
        for &metric in &config.ranking_metrics {
            let values: Vec<f64> = metrics.iter().map(|m| m.get(metric)).collect();
            for (c, r) in composite.iter_mut().zip(descending_ranks(&values)) {
                *c += r;
            }
        }
        if !config.ranking_metrics.is_empty() {
            let k = config.ranking_metrics.len() as f64;
            composite.iter_mut().for_each(|c| *c /= k);
        }
        let mut ranked: Vec<RankedAsset> = candidates
            .into_iter()
            .zip(metrics)
            .zip(composite)
            .map(|((asset, metrics), composite_rank)| RankedAsset { asset: asset.clone(), metrics, composite_rank })
            .collect();
        ranked.sort_by(by_rank);
        ranked.truncate(wanted);
        out.extend(ranked);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct UniverseSummary {
    pub count: usize,
    pub per_class: BTreeMap<CapClass, usize>,
    pub mean_env_score: f64,
    /// Number of distinct sectors, when every asset carries one.
    pub sector_count: Option<usize>,
}

pub fn universe_summary(selected: &[AssetRecord]) -> Result<UniverseSummary> {
    if selected.is_empty() {
        return Err(Error::InsufficientData { what: "universe summary", needed: 1, got: 0 });
    }
    let mut per_class = BTreeMap::new();
    for a in selected {
        *per_class.entry(a.cap_class()).or_insert(0) += 1;
    }
    let mean_env_score = selected.iter().map(AssetRecord::env_score).sum::<f64>() / selected.len() as f64;
    let sectors: Option<BTreeSet<&str>> = selected.iter().map(AssetRecord::sector).collect();
    Ok(UniverseSummary { count: selected.len(), per_class, mean_env_score, sector_count: sectors.map(|s| s.len()) })
}
