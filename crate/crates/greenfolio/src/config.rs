//! TOML run configuration and scenario definitions.

use std::path::{Path, PathBuf};

use greenfolio_core::data::YearSpan;
use greenfolio_core::frontier::{SamplingMode, DEFAULT_INITIAL_VALUE, DEFAULT_SAMPLE_COUNT};
use greenfolio_core::scenario::{MarketRule, PfRule, ScenarioDefaults, ScenarioSpec, YearRule, HORIZON};
use greenfolio_core::universe::ScreeningConfig;
use greenfolio_core::DEFAULT_RISK_FREE_RATE;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputPaths {
    pub assets: PathBuf,
    pub losses: PathBuf,
    pub intensity: PathBuf,
    pub market: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpanConfig {
    pub start: i32,
    pub end: i32,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioSection {
    /// Scenario definitions replacing the four defaults.
    pub file: Option<PathBuf>,
    pub defaults: ScenarioDefaults,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Required, either here or on the command line.
    pub seed: Option<u64>,
    #[serde(default = "default_risk_free_rate")]
    pub risk_free_rate: f64,
    #[serde(default = "default_sample_count")]
    pub sample_count: usize,
    #[serde(default)]
    pub sampling: SamplingMode,
    #[serde(default = "default_initial_value")]
    pub initial_value: f64,
    /// Defaults to the span of the market series.
    #[serde(default)]
    pub span: Option<SpanConfig>,
    /// Not echoed in the manifest so that runs into different directories
    /// produce identical bytes.
    #[serde(default = "default_out_dir", skip_serializing)]
    pub out_dir: PathBuf,
    pub inputs: InputPaths,
    #[serde(default)]
    pub screening: ScreeningConfig,
    #[serde(default)]
    pub scenarios: ScenarioSection,
}

fn default_risk_free_rate() -> f64 {
    DEFAULT_RISK_FREE_RATE
}

fn default_sample_count() -> usize {
    DEFAULT_SAMPLE_COUNT
}

fn default_initial_value() -> f64 {
    DEFAULT_INITIAL_VALUE
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub sample_count: Option<usize>,
    pub risk_free_rate: Option<f64>,
    pub out_dir: Option<PathBuf>,
}

impl RunConfig {
    /// Parses TOML; relative input and scenario paths are resolved against
    /// `base_dir`. The output directory stays relative to the working
    /// directory, like `--out`.
    pub fn from_toml(text: &str, base_dir: &Path) -> Result<Self> {
        let mut config: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base_dir.join(&*p);
            }
        };
        resolve(&mut config.inputs.assets);
        resolve(&mut config.inputs.losses);
        resolve(&mut config.inputs.intensity);
        resolve(&mut config.inputs.market);
        if let Some(f) = config.scenarios.file.as_mut() {
            resolve(f);
        }
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text, path.parent().unwrap_or(Path::new("")))
    }

    pub fn apply(&mut self, overrides: &Overrides) {
        if let Some(s) = overrides.seed {
            self.seed = Some(s);
        }
        if let Some(n) = overrides.sample_count {
            self.sample_count = n;
        }
        if let Some(r) = overrides.risk_free_rate {
            self.risk_free_rate = r;
        }
        if let Some(o) = &overrides.out_dir {
            self.out_dir = o.clone();
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.seed.is_none() {
            return Err(Error::Config("a seed is required (config `seed` or --seed)".into()));
        }
        if !(self.risk_free_rate > -1.0 && self.risk_free_rate < 1.0) {
            return Err(Error::Config(format!("risk_free_rate {} must lie in (-1, 1)", self.risk_free_rate)));
        }
        if self.sample_count == 0 {
            return Err(Error::Config("sample_count must be at least 1".into()));
        }
        if !(self.initial_value > 0.0 && self.initial_value.is_finite()) {
            return Err(Error::Config(format!("initial_value {} must be positive", self.initial_value)));
        }
        if let Some(s) = self.span {
            YearSpan::new(s.start, s.end).map_err(|e| Error::Config(e.to_string()))?;
        }
        self.screening.validate().map_err(|e| Error::Config(e.to_string()))
    }

    pub fn seed(&self) -> u64 {
        self.seed.expect("validated")
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    scenario: Vec<ScenarioEntry>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioEntry {
    name: String,
    year: Vec<YearEntry>,
}

/// One projected year. The market return is fixed (`market_return`), an
/// offset from the baseline (`market_offset`) or, with neither, the baseline.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct YearEntry {
    market_return: Option<f64>,
    market_offset: Option<f64>,
    pf_percentile: Option<f64>,
    pf_usd_bn: Option<f64>,
    tf_decrement: f64,
}

impl YearEntry {
    fn into_rule(self, scenario: &str) -> Result<YearRule> {
        let market = match (self.market_return, self.market_offset) {
            (Some(r), None) => MarketRule::Absolute(r),
            (None, Some(o)) => MarketRule::BaselineOffset(o),
            (None, None) => MarketRule::Baseline,
            (Some(_), Some(_)) => {
                return Err(Error::Config(format!("{scenario}: market_return and market_offset are exclusive")))
            }
        };
        let pf = match (self.pf_percentile, self.pf_usd_bn) {
            (Some(p), None) => PfRule::Percentile(p),
            (None, Some(v)) => PfRule::AbsoluteUsdBn(v),
            _ => return Err(Error::Config(format!("{scenario}: give exactly one of pf_percentile and pf_usd_bn"))),
        };
        Ok(YearRule { market, pf, tf_decrement: self.tf_decrement })
    }
}

/// Parses scenario definitions: `[[scenario]]` tables with a `name` and
/// exactly three `[[scenario.year]]` entries.
pub fn parse_scenarios(text: &str) -> Result<Vec<ScenarioSpec>> {
    let file: ScenarioFile = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    if file.scenario.is_empty() {
        return Err(Error::Config("no scenarios defined".into()));
    }
    file.scenario
        .into_iter()
        .map(|entry| {
            let name = entry.name;
            if entry.year.len() != HORIZON {
                return Err(Error::Config(format!("{name}: expected {HORIZON} years, found {}", entry.year.len())));
            }
            let rules: Vec<YearRule> = entry.year.into_iter().map(|y| y.into_rule(&name)).collect::<Result<_>>()?;
            let spec = ScenarioSpec { name, years: rules.try_into().expect("length checked") };
            spec.validate().map_err(|e| Error::Config(format!("{}: {e}", spec.name)))?;
            Ok(spec)
        })
        .collect()
}

pub fn load_scenarios(path: &Path) -> Result<Vec<ScenarioSpec>> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_scenarios(&text)
}
