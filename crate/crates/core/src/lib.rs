//! Forecasting and certification toolkit for high-dimensional stationary time series.
//!
//! The crate is organised around five pieces:
//!
//! - [`network`]: feedforward ReLU networks with a designated bottleneck layer, their
//!   evaluation, structural combinators and class-membership checks.
//! - [`train`]: weighted empirical prediction risk, backpropagation and SGD training,
//!   the naive baseline and iterated multi-step forecasts.
//! - [`approx`]: explicit ReLU constructions (approximate multiplication, products,
//!   hat functions, local Taylor patches) with certified sup-norm and Lipschitz bounds.
//! - [`rates`]: the dependence-rate calculus (mixing and functional-dependence rate
//!   functions, entropy bounds, choice of the network size parameter).
//! - [`simulate`]: stationary recursions, lag embedding, Monte Carlo prediction error
//!   and coupled-path estimates of the functional dependence measure.

// `!(x > 0.0)` is used deliberately so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod approx;
mod error;
pub mod network;
pub mod presets;
pub mod rates;
pub mod rng;
pub mod simulate;
pub mod train;

pub use error::{Error, Result};
pub use network::{Architecture, Network};
