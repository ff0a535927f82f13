//! Constructive ReLU approximation of Hölder-smooth functions.
//!
//! [`mult_net`] and [`multiprod_net`] realise approximate products, [`hat_net`] localised
//! bumps on a grid, [`build_approximator`] the full Taylor-patch approximant with its
//! guaranteed bounds, and [`build_encoder_decoder`] chains three such approximants
//! through a bottleneck layer. [`certify`] measures a built network against its bounds.

mod builder;
mod encdec;
pub mod holder;
mod mult;
mod verify;

pub use builder::{approximator_depth, build_approximator, ApproxPlan, TheoreticalBounds};
pub use encdec::{build_encoder_decoder, Component, EncoderDecoderReport, EncoderDecoderSpec, Stage, StageReport};
pub use holder::{catalog, multi_indices, HolderFunction};
pub use mult::{hat_net, mult_net, multiprod_net};
pub use verify::{certify, certify_network, measure_lipschitz, measure_sup, Certificate, EvalGrid, MAX_GRID_POINTS};
