//! Climate-extended CAPM:
//! `r_V = r_f + alpha + beta_market (r_m - r_f) + beta_pf PF + beta_tf TF`,
//! fitted by least squares on the excess return `r_V - r_f`.

mod design;
pub mod dist;
mod ols;

pub use design::{assemble_design, Design, MIN_REGRESSION_YEARS};
pub use ols::{ols, ols_fit, FactorLoadings, FactorModelFit, OlsSolution, COEFFICIENT_LABELS};
