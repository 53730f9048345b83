use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};
use crate::linalg::{dot, Matrix};

/// Tolerance on `Σw = 1` for externally supplied weights.
const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

/// Below this, `w C wᵀ` is taken as evidence that `C` is not PSD.
const PSD_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PortfolioMetrics {
    pub mu: f64,
    pub sigma: f64,
    pub es: f64,
}

/// A sampled portfolio and its metric triple.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PortfolioSample {
    /// Position in the sampled sequence.
    pub index: usize,
    pub weights: Vec<f64>,
    pub mu: f64,
    pub sigma: f64,
    pub es: f64,
}

impl PortfolioSample {
    pub fn metrics(&self) -> PortfolioMetrics {
        PortfolioMetrics { mu: self.mu, sigma: self.sigma, es: self.es }
    }

    pub fn point(&self) -> [f64; 3] {
        [self.mu, self.sigma, self.es]
    }
}

/// `mu = m·wᵀ`, `sigma = sqrt(w C wᵀ)`, `es = es·wᵀ`.
pub fn portfolio_metrics(
    weights: &[f64],
    mean: &[f64],
    covariance: &Matrix,
    env_scores: &[f64],
) -> Result<PortfolioMetrics> {
    let n = weights.len();
    for len in [mean.len(), env_scores.len(), covariance.rows(), covariance.cols()] {
        if len != n {
            return Err(Error::DimensionMismatch { expected: n, got: len });
        }
    }
    if let Some(&w) = weights.iter().find(|w| !(**w >= 0.0)) {
        return Err(Error::OutOfRange { what: "portfolio weight", value: w });
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
        return Err(Error::OutOfRange { what: "sum of weights", value: total });
    }
    let variance = covariance.quadratic_form(weights)?;
    if variance < -PSD_TOLERANCE {
        return Err(Error::NotPositiveSemidefinite(variance));
    }
    Ok(PortfolioMetrics { mu: dot(mean, weights), sigma: libm::sqrt(variance.max(0.0)), es: dot(env_scores, weights) })
}

/// Evaluates every weight vector, keeping index order.
pub fn evaluate_samples(
    weights: Vec<Vec<f64>>,
    mean: &[f64],
    covariance: &Matrix,
    env_scores: &[f64],
) -> Result<Vec<PortfolioSample>> {
    weights
        .into_iter()
        .enumerate()
        .map(|(index, w)| {
            let m = portfolio_metrics(&w, mean, covariance, env_scores)?;
            Ok(PortfolioSample { index, weights: w, mu: m.mu, sigma: m.sigma, es: m.es })
        })
        .collect()
}

/// `(mu - r_f) · es`
pub fn green_excess_return(mu: f64, es: f64, r_f: f64) -> f64 {
    (mu - r_f) * es
}

/// `((mu - r_f) / sigma) · es`; zero volatility is rejected.
pub fn green_sharpe(mu: f64, sigma: f64, es: f64, r_f: f64) -> Result<f64> {
    if !(sigma > 0.0) {
        return Err(Error::ZeroVolatility);
    }
    Ok((mu - r_f) / sigma * es)
}

/// The sample with the largest green Sharpe ratio.
///
/// Ties go to the lower `sigma`, then to the lower `index`.
pub fn select_optimal(samples: &[PortfolioSample], r_f: f64) -> Result<&PortfolioSample> {
    let mut best: Option<(&PortfolioSample, f64)> = None;
    for s in samples {
        let score = green_sharpe(s.mu, s.sigma, s.es, r_f)?;
        let better = match best {
            None => true,
            Some((b, b_score)) => match score.total_cmp(&b_score) {
                Ordering::Greater => true,
                Ordering::Less => false,
                Ordering::Equal => (s.sigma, s.index) < (b.sigma, b.index),
            },
        };
        if better {
            best = Some((s, score));
        }
    }
    best.map(|(s, _)| s).ok_or(Error::InsufficientData { what: "samples", needed: 1, got: 0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn two_asset() -> (Vec<f64>, Matrix, Vec<f64>) {
        (vec![0.10, 0.20], Matrix::from_diagonal(&[0.04, 0.09]), vec![50.0, 60.0])
    }

    fn sample(index: usize, mu: f64, sigma: f64, es: f64) -> PortfolioSample {
        PortfolioSample { index, weights: vec![1.0], mu, sigma, es }
    }

    #[test]
    fn single_asset_identity() {
        let (m, c, es) = two_asset();
        let r = portfolio_metrics(&[1.0, 0.0], &m, &c, &es).unwrap();
        assert_eq!(r, PortfolioMetrics { mu: 0.10, sigma: 0.20, es: 50.0 });
    }

    #[test]
    fn equal_weight_two_asset() {
        let (m, c, es) = two_asset();
        let r = portfolio_metrics(&[0.5, 0.5], &m, &c, &es).unwrap();
        assert!((r.mu - 0.15).abs() < 1e-15);
        // sqrt(0.25·0.04 + 0.25·0.09) = sqrt(0.0325)
        assert!((r.sigma - 0.180_277_563_773_199_5).abs() < 1e-12);
        assert!((r.es - 55.0).abs() < 1e-12);
    }

    #[test]
    fn metric_errors() {
        let (m, c, es) = two_asset();
        assert!(matches!(portfolio_metrics(&[1.0], &m, &c, &es), Err(Error::DimensionMismatch { .. })));
        let bad = Matrix::from_rows(&[vec![0.01, -0.5], vec![-0.5, 0.01]]).unwrap();
        assert!(matches!(portfolio_metrics(&[0.5, 0.5], &m, &bad, &es), Err(Error::NotPositiveSemidefinite(_))));
        assert!(portfolio_metrics(&[1.2, -0.2], &m, &c, &es).is_err());
    }

    #[test]
    fn green_ratios() {
        assert_eq!(green_excess_return(0.0695, 70.0, 0.0695), 0.0);
        assert!((green_excess_return(0.15, 55.0, 0.0695) - 4.4275).abs() < 1e-12);
        assert_eq!(green_sharpe(0.0695, 0.2, 70.0, 0.0695).unwrap(), 0.0);
        // 0.0805 / 0.180277563773 · 55 = 24.5593...
        let g = green_sharpe(0.15, 0.180_278, 55.0, 0.0695).unwrap();
        assert!((g - 24.559).abs() < 1e-3, "{g}");
        assert_eq!(green_sharpe(0.2, 0.0, 55.0, 0.0695), Err(Error::ZeroVolatility));
    }

    #[test]
    fn selection_tie_breaks() {
        let single = [sample(0, 0.2, 0.3, 40.0)];
        assert_eq!(select_optimal(&single, 0.05).unwrap().index, 0);
        // 0.5/0.5·60 = 0.25/0.25·60 exactly
        let tied = [sample(0, 0.5, 0.5, 60.0), sample(1, 0.25, 0.25, 60.0)];
        assert_eq!(select_optimal(&tied, 0.0).unwrap().index, 1);
        let dup = [sample(4, 0.2, 0.2, 60.0), sample(2, 0.2, 0.2, 60.0)];
        assert_eq!(select_optimal(&dup, 0.05).unwrap().index, 2);
        assert!(select_optimal(&[], 0.05).is_err());
        assert_eq!(select_optimal(&[sample(0, 0.2, 0.0, 1.0)], 0.05), Err(Error::ZeroVolatility));
    }
}
