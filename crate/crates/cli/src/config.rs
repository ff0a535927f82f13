//! JSON schemas of the subcommand configs. Every struct rejects unknown keys.

use std::path::{Path, PathBuf};

use ednet::rates::{DependenceSpec, SmoothnessProfile};
use ednet::simulate::{generate, high_d_model, low_d_model, SeasonalModel, Series, TimeSeriesModel};
use ednet::train::{SweepSpec, TrainConfig, WeightFn};
use ednet::Network;
use nalgebra::DMatrix;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::Failure;

/// Parses `text` into `T`, reporting the JSON path of the first offending field.
pub fn parse<T: DeserializeOwned>(text: &str) -> Result<T, Failure> {
    let mut de = serde_json::Deserializer::from_str(text);
    let value: T = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if path.is_empty() || path == "." {
            Failure::Config(format!("config: {inner}"))
        } else {
            Failure::Config(format!("config field `{path}`: {inner}"))
        }
    })?;
    de.end().map_err(|e| Failure::Config(format!("config: {e}")))?;
    Ok(value)
}

pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Config(format!("cannot read config {}: {e}", path.display())))?;
    parse(&text)
}

/// Model to simulate. The presets take their parameters from the seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    LowD {},
    HighD {},
    /// Eight-site seasonal series.
    Seasonal {},
    Zero { d: usize, r: usize, noise_sd: f64 },
    Ar1 { a: f64, noise_sd: f64 },
    /// `f₀(x) = v a x` with `v` of shape `d × k` and `a` of shape `k × rd`, given as rows.
    Linear { v: Vec<Vec<f64>>, a: Vec<Vec<f64>>, noise_sd: f64 },
    /// A trained network file used as `f₀`.
    Network { path: PathBuf, r: usize, noise_sd: f64 },
}

pub enum Generator {
    Recursion(TimeSeriesModel),
    Seasonal(SeasonalModel),
}

impl Generator {
    /// Lag count of the recursion; the seasonal model has two.
    pub fn lags(&self) -> usize {
        match self {
            Generator::Recursion(m) => m.r,
            Generator::Seasonal(_) => 2,
        }
    }

    pub fn generate(&self, n: usize, burn_in: usize) -> ednet::Result<Series> {
        match self {
            Generator::Recursion(m) => generate(m, n, burn_in),
            Generator::Seasonal(m) => m.generate(n, burn_in),
        }
    }
}

fn matrix(rows: &[Vec<f64>], name: &str) -> Result<DMatrix<f64>, Failure> {
    let cols = rows.first().map_or(0, Vec::len);
    if rows.is_empty() || cols == 0 || rows.iter().any(|r| r.len() != cols) {
        return Err(Failure::Config(format!("model.{name} must be a nonempty list of equal-length rows")));
    }
    Ok(DMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j]))
}

impl ModelSpec {
    pub fn build(&self, seed: u64) -> Result<Generator, Failure> {
        let model = match self {
            ModelSpec::LowD {} => low_d_model(seed),
            ModelSpec::HighD {} => high_d_model(seed),
            ModelSpec::Seasonal {} => {
                let m = SeasonalModel::eight_sites(seed);
                m.validate()?;
                return Ok(Generator::Seasonal(m));
            }
            ModelSpec::Zero { d, r, noise_sd } => TimeSeriesModel::zero(*d, *r, *noise_sd, seed)?,
            ModelSpec::Ar1 { a, noise_sd } => TimeSeriesModel::ar1(*a, *noise_sd, seed)?,
            ModelSpec::Linear { v, a, noise_sd } => TimeSeriesModel::linear(matrix(v, "v")?, matrix(a, "a")?, *noise_sd, seed)?,
            ModelSpec::Network { path, r, noise_sd } => {
                let net = Network::load(path)
                    .map_err(|e| Failure::Config(format!("cannot load network {}: {e}", path.display())))?;
                TimeSeriesModel::from_network(&net, *r, *noise_sd, seed)?
            }
        };
        Ok(Generator::Recursion(model))
    }
}

fn default_burn_in() -> usize {
    ednet::simulate::DEFAULT_BURN_IN
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub model: ModelSpec,
    pub n: usize,
    #[serde(default = "default_burn_in")]
    pub burn_in: usize,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    LowD,
    HighD,
    Seasonal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArchSpec {
    pub widths: Vec<usize>,
    #[serde(default)]
    pub bottleneck: Option<usize>,
}

/// Either a preset experiment or a series CSV, with optional overrides of every
/// preset setting. The first `n_train` rows train, the rest are held out.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainCommandConfig {
    #[serde(default)]
    pub preset: Option<Preset>,
    #[serde(default)]
    pub data: Option<PathBuf>,
    #[serde(default)]
    pub n_train: Option<usize>,
    #[serde(default)]
    pub r: Option<usize>,
    #[serde(default)]
    pub normalize: Option<bool>,
    #[serde(default)]
    pub architecture: Option<ArchSpec>,
    #[serde(default)]
    pub train: Option<TrainConfig>,
    #[serde(default)]
    pub epochs: Option<usize>,
    #[serde(default)]
    pub weight: WeightFn,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
    #[serde(default)]
    pub seed: Option<u64>,
}

fn default_k() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvaluateConfig {
    /// Model file written by `train`.
    pub model: PathBuf,
    pub data: PathBuf,
    /// Rows of `data` to skip, e.g. the training part of a combined series.
    #[serde(default)]
    pub start: usize,
    /// Expected lag count; must agree with the model.
    #[serde(default)]
    pub r: Option<usize>,
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default)]
    pub weight: WeightFn,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertifyConfig {
    pub function: String,
    /// Defaults to the smallest admissible value.
    #[serde(default, rename = "N")]
    pub n: Option<usize>,
    pub m: usize,
    #[serde(default)]
    pub sup_cap: Option<f64>,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatesConfig {
    pub dependence: DependenceSpec,
    pub profile: SmoothnessProfile,
    /// Decay exponent for the choice of `N`; defaults to the polynomial mixing one.
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub xs: Option<Vec<f64>>,
    #[serde(default)]
    pub ns: Option<Vec<f64>>,
    #[serde(default)]
    pub seed: Option<u64>,
}
