use alloc::vec::Vec;

use super::dist::two_sided_p_value;
use crate::error::{Error, Result};
use crate::linalg::{Matrix, Qr};

/// Labels of the four coefficients, in design-column order.
pub const COEFFICIENT_LABELS: [&str; 4] = ["const", "ind", "pf", "tf"];

/// General least-squares solution with classical inference.
#[derive(Debug, Clone, PartialEq)]
pub struct OlsSolution {
    pub coefficients: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub t_stats: Vec<f64>,
    pub p_values: Vec<f64>,
    pub residuals: Vec<f64>,
    pub r_squared: f64,
    pub n_obs: usize,
    pub dof: usize,
}

/// Fits `response ≈ design · β` through a Householder QR of the design.
///
/// The first design column is expected to be the intercept; R² uses the
/// centered total sum of squares.
pub fn ols(response: &[f64], design: &Matrix) -> Result<OlsSolution> {
    let (n, k) = (design.rows(), design.cols());
    if response.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: response.len() });
    }
    if n <= k {
        return Err(Error::InsufficientData { what: "regression rows", needed: k + 1, got: n });
    }
    let mean = response.iter().sum::<f64>() / n as f64;
    let sst: f64 = response.iter().map(|y| (y - mean) * (y - mean)).sum();
    if sst == 0.0 {
        return Err(Error::ZeroVarianceResponse);
    }
    let qr = Qr::decompose(design)?;
    let coefficients = qr.solve_least_squares(response)?;
    let fitted = design.mul_vec(&coefficients)?;
    let residuals: Vec<f64> = response.iter().zip(&fitted).map(|(y, f)| y - f).collect();
    let ssr: f64 = residuals.iter().map(|e| e * e).sum();
    let dof = n - k;
    let sigma2 = ssr / dof as f64;
    let gram_inv = qr.gram_inverse();

    let std_errors: Vec<f64> = (0..k).map(|j| libm::sqrt((sigma2 * gram_inv[(j, j)]).max(0.0))).collect();
    let t_stats: Vec<f64> = coefficients
        .iter()
        .zip(&std_errors)
        .map(|(&b, &se)| if se == 0.0 && b == 0.0 { 0.0 } else { b / se })
        .collect();
    let p_values = t_stats.iter().map(|&t| two_sided_p_value(t, dof as f64)).collect();
    let r_squared = (1.0 - ssr / sst).clamp(0.0, 1.0);
    Ok(OlsSolution { coefficients, std_errors, t_stats, p_values, residuals, r_squared, n_obs: n, dof })
}

/// Intercept and slopes of the climate-extended CAPM.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FactorLoadings {
    pub alpha: f64,
    pub beta_market: f64,
    pub beta_pf: f64,
    pub beta_tf: f64,
}

impl FactorLoadings {
    pub fn as_array(&self) -> [f64; 4] {
        [self.alpha, self.beta_market, self.beta_pf, self.beta_tf]
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FactorModelFit {
    pub loadings: FactorLoadings,
    /// Per-coefficient statistics in [`COEFFICIENT_LABELS`] order.
    pub std_errors: [f64; 4],
    pub t_stats: [f64; 4],
    pub p_values: [f64; 4],
    pub r_squared: f64,
    pub n_obs: usize,
    pub dof: usize,
}

/// OLS fit of the four-column factor design (`const, ind, pf, tf`).
pub fn ols_fit(response: &[f64], design: &Matrix) -> Result<FactorModelFit> {
    if design.cols() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, got: design.cols() });
    }
    let sol = ols(response, design)?;
    let arr = |v: &[f64]| [v[0], v[1], v[2], v[3]];
    Ok(FactorModelFit {
        loadings: FactorLoadings {
            alpha: sol.coefficients[0],
            beta_market: sol.coefficients[1],
            beta_pf: sol.coefficients[2],
            beta_tf: sol.coefficients[3],
        },
        std_errors: arr(&sol.std_errors),
        t_stats: arr(&sol.t_stats),
        p_values: arr(&sol.p_values),
        r_squared: sol.r_squared,
        n_obs: sol.n_obs,
        dof: sol.dof,
    })
}
