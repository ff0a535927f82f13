//! Named experiment settings shared by the CLI and the acceptance suite.

use serde::Serialize;

use crate::network::{Architecture, Network};
use crate::simulate::{generate, high_d_model, lag_embed, low_d_model, SeasonalModel, Series, TimeSeriesModel, DEFAULT_BURN_IN};
use crate::train::{empirical_risk, naive_predict, run_sweep, train_sgd, SweepCell, SweepSpec, TrainConfig, TrainReport, WeightFn};
use crate::{rng, Error, Result};

pub const FORECAST_PRESETS: [&str; 2] = ["low_d", "high_d"];

/// A simulated forecasting experiment: one series of `n_train + n_test` steps, the
/// first part for training and the rest held out.
#[derive(Debug, Clone)]
pub struct ForecastPreset {
    pub name: &'static str,
    pub model: TimeSeriesModel,
    pub arch: Architecture,
    pub train: TrainConfig,
    pub n_train: usize,
    pub n_test: usize,
}

/// Five coordinates, one lag, bottleneck of width one.
pub fn low_d(seed: u64) -> ForecastPreset {
    ForecastPreset {
        name: "low_d",
        model: low_d_model(seed),
        arch: Architecture::new(vec![5, 20, 10, 1, 10, 20, 5]).and_then(|a| a.with_bottleneck(3)).expect("fixed widths"),
        train: TrainConfig {
            epochs: 60,
            lr_schedule: vec![(0, 0.003), (30, 0.0002)],
            l2_lambda: 1e-5,
            batch_size: 1,
            seed,
            project_entries: false,
            prune_to_s: None,
        },
        n_train: 1000,
        n_test: 1000,
    }
}

/// Thirty coordinates, one lag, bottleneck of width two.
pub fn high_d(seed: u64) -> ForecastPreset {
    ForecastPreset {
        name: "high_d",
        model: high_d_model(seed),
        arch: Architecture::new(vec![30, 60, 30, 2, 30, 60, 30]).and_then(|a| a.with_bottleneck(3)).expect("fixed widths"),
        train: TrainConfig {
            epochs: 100,
            lr_schedule: vec![(0, 0.005), (50, 0.0005)],
            l2_lambda: 1e-5,
            batch_size: 1,
            seed,
            project_entries: false,
            prune_to_s: None,
        },
        n_train: 1000,
        n_test: 1000,
    }
}

pub fn forecast_by_name(name: &str, seed: u64) -> Result<ForecastPreset> {
    match name {
        "low_d" => Ok(low_d(seed)),
        "high_d" => Ok(high_d(seed)),
        other => Err(Error::Config(format!("unknown preset {other:?}; known: {}", FORECAST_PRESETS.join(", ")))),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ForecastOutcome {
    #[serde(skip)]
    pub net: Network,
    pub report: TrainReport,
    pub train_risk: f64,
    pub test_risk: f64,
    pub naive_test_risk: f64,
}

impl ForecastPreset {
    /// The full simulated path, training part first.
    pub fn series(&self) -> Result<Series> {
        generate(&self.model, self.n_train + self.n_test, DEFAULT_BURN_IN)
    }

    /// Simulates, trains from the seeded initialisation and scores on the held-out part.
    pub fn run(&self) -> Result<ForecastOutcome> {
        let series = self.series()?;
        self.run_on(&series)
    }

    pub fn run_on(&self, series: &Series) -> Result<ForecastOutcome> {
        if series.len() < self.n_train + 2 {
            return Err(Error::Precondition(format!(
                "series has {} steps but the preset trains on {}",
                series.len(),
                self.n_train
            )));
        }
        let r = self.model.r;
        let train = lag_embed(&series.slice(0..self.n_train), r, false)?;
        // the held-out pairs start from the last training states
        let test = lag_embed(&series.slice(self.n_train - r..series.len()), r, false)?;
        let w = WeightFn::ConstantOne;
        let mut init = rng::stream(self.train.seed, rng::STREAM_INIT);
        let net = Network::initial(self.arch.clone(), &mut init)?;
        let (net, report) = train_sgd(&net, &train, &self.train, &w, Some(&test))?;
        Ok(ForecastOutcome {
            train_risk: empirical_risk(&net, &train, &w)?,
            test_risk: empirical_risk(&net, &test, &w)?,
            naive_test_risk: naive_predict(&test, &w)?,
            net,
            report,
        })
    }
}

/// The seasonal eight-site sweep.
#[derive(Debug, Clone)]
pub struct SeasonalPreset {
    pub model: SeasonalModel,
    pub sweep: SweepSpec,
    pub train: TrainConfig,
    pub n_train: usize,
    pub n_test: usize,
}

pub fn seasonal(seed: u64) -> SeasonalPreset {
    SeasonalPreset {
        model: SeasonalModel::eight_sites(seed),
        sweep: SweepSpec { rs: vec![1, 2, 3, 5], ms: vec![4, 6, 8, 10], hidden: 24, repeats: 1, normalize: true },
        train: TrainConfig {
            epochs: 100,
            lr_schedule: vec![(0, 0.1), (45, 0.01)],
            l2_lambda: 0.0,
            batch_size: 1,
            seed,
            project_entries: false,
            prune_to_s: None,
        },
        n_train: 1500,
        n_test: 400,
    }
}

impl SeasonalPreset {
    pub fn series(&self) -> Result<Series> {
        self.model.generate(self.n_train + self.n_test, DEFAULT_BURN_IN)
    }

    pub fn run(&self) -> Result<Vec<SweepCell>> {
        let series = self.series()?;
        let train = series.slice(0..self.n_train);
        let test = series.slice(self.n_train..series.len());
        run_sweep(&train, &test, &self.sweep, &self.train, &WeightFn::ConstantOne)
    }
}
