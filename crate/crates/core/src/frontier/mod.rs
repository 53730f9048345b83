//! Random long-only portfolios in (expected return, volatility, environmental
//! score) space, their convex hull, the optimal green portfolio and its
//! buy-and-hold backtest.

mod backtest;
mod hull;
mod metrics;
mod sampling;

pub use backtest::{backtest, Backtest, ValuationSnapshot, DEFAULT_INITIAL_VALUE};
pub use hull::{build_hull, build_hull_from_points, Facet, FrontierHull, HULL_TOLERANCE};
pub use metrics::{
    evaluate_samples, green_excess_return, green_sharpe, portfolio_metrics, select_optimal, PortfolioMetrics,
    PortfolioSample,
};
pub use sampling::{sample_weights, SamplingMode, DEFAULT_SAMPLE_COUNT};
