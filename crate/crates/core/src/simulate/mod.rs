//! Series generation from `X_i = f₀(𝕏_{i-1}) + ε_i`, lag embedding, CSV exchange and
//! Monte Carlo functionals of the generating model.

mod dataset;
mod mc;
mod model;
mod seasonal;
mod series;

pub use dataset::{lag_embed, lag_embed_with, LagDataset, Scaler};
pub use mc::{estimate_fdm, prediction_error_mc, Estimate, MC_BLOCK, MC_SPACING};
pub use model::{generate, high_d_model, low_d_model, Closure, EvolutionMap, TimeSeriesModel, DEFAULT_BURN_IN};
pub use seasonal::SeasonalModel;
pub use series::Series;
