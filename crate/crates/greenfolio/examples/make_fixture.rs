//! Regenerates the bundled synthetic dataset under `fixtures/`.
//!
//! Asset returns follow a four-factor model driven by the generated market,
//! loss and intensity series, so the pipeline has real structure to find.
//! The universe carries a few extras that screening must reject: scores at
//! or below the floor, one small cap with a price gap, and surplus large and
//! mid caps.
//!
//! `cargo run -p greenfolio --example make_fixture [-- <dir>]`

use std::fmt::Write as _;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal, Normal};

const FIRST_YEAR: i32 = 1999;
const LAST_YEAR: i32 = 2023;
const HISTORY_START: i32 = 1990;
const RISK_FREE: f64 = 0.0695;

const SECTORS: [&str; 8] =
    ["utilities", "it", "financials", "consumer", "industrials", "healthcare", "materials", "telecom"];

struct Spec {
    cap: &'static str,
    env_score: Option<f64>,
    first_year: i32,
}

fn main() {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures"));
    std::fs::create_dir_all(&dir).expect("create fixture dir");
    let mut rng = ChaCha8Rng::seed_from_u64(2023);

    let loss_dist = LogNormal::new(6.0f64.ln(), 0.7).unwrap();
    let losses: Vec<(i32, f64)> =
        (HISTORY_START..=LAST_YEAR).map(|y| (y, round(loss_dist.sample(&mut rng), 2))).collect();

    let intensity_noise = Normal::<f64>::new(0.0, 0.003).unwrap();
    let intensity: Vec<(i32, f64)> = (HISTORY_START..=LAST_YEAR)
        .map(|y| (y, round(0.45 - 0.007 * f64::from(y - HISTORY_START) + intensity_noise.sample(&mut rng), 4)))
        .collect();

    let market_dist = Normal::<f64>::new(0.13, 0.18).unwrap();
    let mut level = 1000.0;
    let mut market = vec![(FIRST_YEAR, level)];
    for y in FIRST_YEAR + 1..=LAST_YEAR {
        level = round(level * (1.0 + market_dist.sample(&mut rng).max(-0.55)), 2);
        market.push((y, level));
    }

    let mut specs = Vec::new();
    for (cap, count) in [("large", 18), ("mid", 8), ("small", 5)] {
        for i in 0..count {
            specs.push(Spec {
                cap,
                env_score: None,
                first_year: FIRST_YEAR + if cap == "small" && i == 4 { 4 } else { 0 },
            });
        }
    }
    specs[3].env_score = Some(35.0);
    specs[11].env_score = Some(28.4);
    specs[21].env_score = Some(19.0);

    let level_at = |series: &[(i32, f64)], y: i32| series.iter().find(|(yy, _)| *yy == y).expect("year present").1;
    let span_mean = |series: &[(i32, f64)]| {
        let v: Vec<f64> = series.iter().filter(|(y, _)| *y >= FIRST_YEAR).map(|(_, v)| *v).collect();
        v.iter().sum::<f64>() / v.len() as f64
    };
    let pf_mean = span_mean(&losses);
    let tf_mean = span_mean(&intensity);
    let eps = Normal::<f64>::new(0.0, 0.10).unwrap();

    let mut assets = String::from("ticker,name,cap_class,env_score,year,close,sector\n");
    for (k, spec) in specs.iter().enumerate() {
        let ticker = format!("GRN{:02}", k + 1);
        let name = format!("Synthetic {} {:02}", spec.cap, k + 1);
        let env = spec.env_score.unwrap_or_else(|| round(rng.random_range(36.0..85.0), 1));
        let sector = SECTORS[k % SECTORS.len()];
        let alpha = 0.01 + 0.02 * rng.random_range(-1.0..1.0);
        let beta = rng.random_range(0.6..1.3);
        let g = rng.random_range(-0.004..-0.001);
        let d = rng.random_range(-4.0..-1.0);
        let mut price: f64 = rng.random_range(20.0..2000.0);
        for y in FIRST_YEAR..=LAST_YEAR {
            if y > FIRST_YEAR {
                let r_m = level_at(&market, y) / level_at(&market, y - 1) - 1.0;
                let r = RISK_FREE
                    + alpha
                    + beta * (r_m - RISK_FREE)
                    + g * (level_at(&losses, y) - pf_mean)
                    + d * (level_at(&intensity, y) - tf_mean)
                    + eps.sample(&mut rng);
                price = (price * (1.0 + r.max(-0.7))).max(0.5);
            }
            if y >= spec.first_year {
                writeln!(assets, "{ticker},{name},{},{env},{y},{},{sector}", spec.cap, round(price, 2)).unwrap();
            }
        }
    }

    let series = |header: &str, rows: &[(i32, f64)]| {
        let mut s = format!("{header}\n");
        for (y, v) in rows {
            writeln!(s, "{y},{v}").unwrap();
        }
        s
    };
    std::fs::write(dir.join("assets.csv"), assets).unwrap();
    std::fs::write(dir.join("losses.csv"), series("year,damage_usd_bn", &losses)).unwrap();
    std::fs::write(dir.join("intensity.csv"), series("year,tco2_per_kusd", &intensity)).unwrap();
    std::fs::write(dir.join("market.csv"), series("year,index_level", &market)).unwrap();
    println!("wrote fixtures to {}", dir.display());
}

fn round(x: f64, places: i32) -> f64 {
    let f = 10f64.powi(places);
    (x * f).round() / f
}
