use greenfolio_core::analytics::{cagr, covariance_matrix, percentile, ReturnPanel};
use greenfolio_core::factor::dist::student_t_cdf;
use greenfolio_core::factor::{ols, ols_fit, FactorLoadings};
use greenfolio_core::frontier::{portfolio_metrics, sample_weights, select_optimal, PortfolioSample, SamplingMode};
use greenfolio_core::linalg::Matrix;
use greenfolio_core::scenario::{cumulative_return, project_portfolio_return};
use proptest::prelude::*;

fn panel_from(cols: &[Vec<f64>]) -> ReturnPanel {
    let n = cols[0].len();
    let mut data = Vec::new();
    for t in 0..n {
        data.extend(cols.iter().map(|c| c[t]));
    }
    ReturnPanel::new(
        (0..n as i32).collect(),
        (0..cols.len()).map(|i| i.to_string()).collect(),
        Matrix::from_row_major(n, cols.len(), data).unwrap(),
        vec![0.0; n],
    )
    .unwrap()
}

proptest! {
    #[test]
    fn sampled_weights_are_on_the_simplex(n in 1usize..30, seed in any::<u64>(), flat in any::<bool>()) {
        let mode = if flat { SamplingMode::FlatSimplex } else { SamplingMode::NormalizedUniform };
        for w in sample_weights(n, 50, seed, mode).unwrap() {
            prop_assert!(w.iter().all(|x| *x >= 0.0));
            prop_assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn percentile_monotone_and_bounded(
        mut v in prop::collection::vec(-100.0f64..100.0, 1..40),
        p in 0.0f64..=1.0,
        q in 0.0f64..=1.0,
    ) {
        let (lo, hi) = if p <= q { (p, q) } else { (q, p) };
        let a = percentile(&v, lo).unwrap();
        let b = percentile(&v, hi).unwrap();
        prop_assert!(a <= b);
        v.sort_by(f64::total_cmp);
        prop_assert!(a >= v[0] && b <= v[v.len() - 1]);
        prop_assert_eq!(percentile(&v, 1.0).unwrap(), v[v.len() - 1]);
    }

    #[test]
    fn cagr_reciprocal(a in 0.01f64..1e4, b in 0.01f64..1e4, n in 1u32..40) {
        let r1 = cagr(a, b, n).unwrap();
        let r2 = cagr(b, a, n).unwrap();
        prop_assert!(((1.0 + r1) * (1.0 + r2) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn covariance_symmetric(cols in prop::collection::vec(prop::collection::vec(-0.9f64..2.0, 8), 1..6)) {
        let c = covariance_matrix(&panel_from(&cols)).unwrap();
        prop_assert!(c.is_symmetric());
    }

    #[test]
    fn mu_scales_with_mean_and_es_ignores_risk_inputs(
        n in 1usize..6,
        seed in any::<u64>(),
        scale in 0.1f64..10.0,
    ) {
        let w = &sample_weights(n, 1, seed, SamplingMode::NormalizedUniform).unwrap()[0];
        let m: Vec<f64> = (0..n).map(|i| 0.05 + 0.03 * i as f64).collect();
        let es: Vec<f64> = (0..n).map(|i| 40.0 + 7.0 * i as f64).collect();
        let c = Matrix::from_diagonal(&vec![0.04; n]);
        let c2 = Matrix::from_diagonal(&vec![0.09; n]);
        let base = portfolio_metrics(w, &m, &c, &es).unwrap();
        let m_scaled: Vec<f64> = m.iter().map(|x| x * scale).collect();
        let scaled = portfolio_metrics(w, &m_scaled, &c2, &es).unwrap();
        prop_assert!((scaled.mu - scale * base.mu).abs() < 1e-12 * scale.max(1.0));
        prop_assert_eq!(scaled.es, base.es);
    }

    #[test]
    fn selection_is_permutation_invariant(
        raw in prop::collection::vec((0.0f64..0.3, 0.05f64..0.4, 30.0f64..90.0), 1..60),
        shuffle_seed in any::<u64>(),
    ) {
        let samples: Vec<PortfolioSample> = raw
            .iter()
            .enumerate()
            .map(|(index, (mu, sigma, es))| PortfolioSample { index, weights: vec![1.0], mu: *mu, sigma: *sigma, es: *es })
            .collect();
        let mut shuffled = samples.clone();
        // Fisher-Yates with a fixed LCG
        let mut state = shuffle_seed | 1;
        for i in (1..shuffled.len()).rev() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            shuffled.swap(i, (state >> 33) as usize % (i + 1));
        }
        prop_assert_eq!(
            select_optimal(&samples, 0.0695).unwrap().index,
            select_optimal(&shuffled, 0.0695).unwrap().index
        );
    }

    #[test]
    fn t_cdf_symmetry(x in 0.0f64..50.0, dof in 1.0f64..200.0) {
        prop_assert!((student_t_cdf(-x, dof) - (1.0 - student_t_cdf(x, dof))).abs() < 1e-12);
    }

    #[test]
    fn projection_is_affine(
        alpha in -0.05f64..0.05, b1 in 0.0f64..2.0, b2 in -0.01f64..0.0, b3 in -5.0f64..0.0,
        rm in -0.3f64..0.4, pf in 0.0f64..40.0, tf in 0.05f64..0.4, h in 0.01f64..1.0,
    ) {
        let fit = FactorLoadings { alpha, beta_market: b1, beta_pf: b2, beta_tf: b3 };
        let r_f = 0.0695;
        let base = project_portfolio_return(&fit, rm, pf, tf, r_f);
        let d_market = (project_portfolio_return(&fit, rm + h, pf, tf, r_f) - base) / h;
        let d_pf = (project_portfolio_return(&fit, rm, pf + h, tf, r_f) - base) / h;
        let d_tf = (project_portfolio_return(&fit, rm, pf, tf + h, r_f) - base) / h;
        prop_assert!((d_market - b1).abs() < 1e-10);
        prop_assert!((d_pf - b2).abs() < 1e-10);
        prop_assert!((d_tf - b3).abs() < 1e-10);
        // beta_pf < 0: more physical damage never raises the projection
        prop_assert!(project_portfolio_return(&fit, rm, pf + h, tf, r_f) <= base);
    }

    #[test]
    fn cumulative_return_permutation_invariant(mut r in prop::collection::vec(-0.9f64..1.5, 1..6)) {
        let a = cumulative_return(&r).unwrap();
        r.reverse();
        let b = cumulative_return(&r).unwrap();
        prop_assert!((a - b).abs() < 1e-12 * (1.0 + a.abs()));
        prop_assert_eq!(cumulative_return(&r[..1]).unwrap(), r[0]);
    }

    #[test]
    fn fit_invariant_under_row_permutation(seed in any::<u64>(), rot in 1usize..19) {
        let (y, rows) = synthetic(seed, 20);
        let fit = ols_fit(&y, &Matrix::from_rows(&rows).unwrap()).unwrap();
        let mut y2 = y.clone();
        let mut rows2 = rows.clone();
        y2.rotate_left(rot);
        rows2.rotate_left(rot);
        let fit2 = ols_fit(&y2, &Matrix::from_rows(&rows2).unwrap()).unwrap();
        for (a, b) in fit.loadings.as_array().iter().zip(fit2.loadings.as_array()) {
            prop_assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn noise_columns_never_reduce_r_squared(seed in any::<u64>()) {
        let (y, rows) = synthetic(seed, 20);
        let base = ols(&y, &Matrix::from_rows(&rows).unwrap()).unwrap();
        let mut state = seed ^ 0x9e37_79b9_7f4a_7c15;
        let widened: Vec<Vec<f64>> = rows
            .iter()
            .map(|r| {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
                let mut r = r.clone();
                r.push((state >> 11) as f64 / (1u64 << 53) as f64);
                r
            })
            .collect();
        let wide = ols(&y, &Matrix::from_rows(&widened).unwrap()).unwrap();
        prop_assert!(wide.r_squared >= base.r_squared - 1e-12);
    }
}

/// Deterministic noisy regression data from a seed.
fn synthetic(seed: u64, rows: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
    let mut state = seed | 1;
    let mut next = || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    let mut y = Vec::new();
    let mut x = Vec::new();
    for _ in 0..rows {
        let r = vec![1.0, next() - 0.3, 30.0 * next(), 0.2 + 0.1 * next()];
        y.push(0.01 + 0.9 * r[1] - 0.002 * r[2] - 0.8 * r[3] + 0.1 * (next() - 0.5));
        x.push(r);
    }
    (y, x)
}
