//! Numerical core for green portfolio analytics.
//!
//! The crate is `no_std` (it needs `alloc`) and performs no IO. It covers:
//!
//! - [`data`]: validated asset, loss, intensity and market series plus year alignment,
//! - [`analytics`]: returns, CAGR, mean/covariance estimation and percentiles,
//! - [`universe`]: environmental-score screening with cap-class quotas,
//! - [`frontier`]: random long-only portfolios, the 3D hull of their
//!   (return, risk, environmental score) triples, optimal selection and backtesting,
//! - [`factor`]: least-squares fit of the climate-extended CAPM with inference,
//! - [`scenario`]: climate scenario construction and three-year projections.
//!
//! File formats and the command line live in the `greenfolio` crate.

#![cfg_attr(not(test), no_std)]
#![deny(unsafe_code)]
// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod analytics;
pub mod data;
pub mod error;
pub mod factor;
pub mod frontier;
pub mod linalg;
pub mod scenario;
pub mod universe;

pub use error::{Error, ErrorKind, Result};

/// Risk-free rate used throughout unless configured otherwise (one-year
/// Government of India bond yield).
pub const DEFAULT_RISK_FREE_RATE: f64 = 0.0695;
