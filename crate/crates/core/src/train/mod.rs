//! Weighted empirical risk, backpropagation and SGD training.

mod backprop;
mod risk;
mod sgd;
mod sweep;
mod weight;

pub use backprop::{batch_loss, gradient, Gradient};
pub use risk::{empirical_risk, forecast_errors, multi_step_forecast, naive_predict};
pub use sgd::{prune, train_sgd, EpochRecord, TrainConfig, TrainReport};
pub use sweep::{best_cell, run_sweep, sweep_architecture, sweep_table_csv, SweepCell, SweepSpec};
pub use weight::WeightFn;
