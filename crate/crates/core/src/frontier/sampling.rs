use alloc::vec::Vec;

use rand::distr::{Distribution, Open01};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub const DEFAULT_SAMPLE_COUNT: usize = 20_000;

/// How raw weights are drawn before normalization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum SamplingMode {
    /// i.i.d. U(0,1) draws divided by their sum. Not uniform on the simplex.
    #[default]
    NormalizedUniform,
    /// i.i.d. Exp(1) draws divided by their sum, i.e. flat Dirichlet.
    FlatSimplex,
}

/// Draws `count` long-only weight vectors of length `n_assets`.
///
/// Deterministic for a given seed: vectors are produced in order from a single
/// ChaCha8 stream, `n_assets` draws per vector.
pub fn sample_weights(n_assets: usize, count: usize, seed: u64, mode: SamplingMode) -> Result<Vec<Vec<f64>>> {
    if n_assets == 0 {
        return Err(Error::InsufficientData { what: "assets to sample", needed: 1, got: 0 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let mut w: Vec<f64> = (0..n_assets)
            .map(|_| {
                let u: f64 = Open01.sample(&mut rng);
                match mode {
                    SamplingMode::NormalizedUniform => u,
                    SamplingMode::FlatSimplex => -libm::log(u),
                }
            })
            .collect();
        let total: f64 = w.iter().sum();
        w.iter_mut().for_each(|x| *x /= total);
        out.push(w);
    }
    Ok(out)
}
