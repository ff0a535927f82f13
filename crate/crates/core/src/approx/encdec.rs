//! Encoder-decoder networks assembled from three approximated stages
//! `R^{dr} → [0,1]^D → [0,1]^{d̃} → R^d`, with the bottleneck layer at a chosen depth.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::builder::{build_approximator, ApproxPlan, TheoreticalBounds};
use super::holder::HolderFunction;
use crate::network::{self, ops, Architecture, Network};
use crate::{Error, Result};

/// One output coordinate of a stage: `function` applied to the listed stage inputs.
#[derive(Debug, Clone)]
pub struct Component {
    pub function: HolderFunction,
    pub inputs: Vec<usize>,
}

/// A vector-valued stage with its size parameters.
#[derive(Debug, Clone)]
pub struct Stage {
    pub components: Vec<Component>,
    pub n: usize,
    pub m: usize,
}

impl Stage {
    pub fn output_dim(&self) -> usize {
        self.components.len()
    }

    /// Exact stage map.
    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        self.components
            .iter()
            .map(|c| {
                let args: Vec<f64> = c.inputs.iter().map(|&i| x[i]).collect();
                c.function.eval(&args)
            })
            .collect()
    }

    fn check(&self, name: &str, input_dim: usize) -> Result<()> {
        if self.components.is_empty() {
            return Err(Error::Precondition(format!("stage {name} has no components")));
        }
        for (k, c) in self.components.iter().enumerate() {
            if c.inputs.len() != c.function.t {
                return Err(Error::dim(format!("stage {name} component {k} argument list"), c.function.t, c.inputs.len()));
            }
            if let Some(&bad) = c.inputs.iter().find(|&&i| i >= input_dim) {
                return Err(Error::Precondition(format!(
                    "stage {name} component {k} reads input {bad} but the stage input has dimension {input_dim}"
                )));
            }
        }
        Ok(())
    }

    /// Approximates every component and stacks them into one net reading `input_dim` inputs.
    fn build(&self, input_dim: usize) -> Result<(Network, StageReport)> {
        let mut nets = Vec::with_capacity(self.components.len());
        let mut sup_bound = 0.0_f64;
        let mut lipschitz = 0.0_f64;
        for c in &self.components {
            let plan = ApproxPlan::new(&c.function, self.n, self.m)?;
            nets.push(build_approximator(&c.function, &plan)?);
            sup_bound = sup_bound.max(TheoreticalBounds::new(&c.function, &plan, None).sup);
            lipschitz = lipschitz.max(c.function.lipschitz());
        }
        let depth = nets.iter().map(Network::depth).max().unwrap_or(0);
        let selected: Result<Vec<Network>> = nets
            .iter()
            .zip(&self.components)
            .map(|(net, c)| {
                let sel = DMatrix::from_fn(c.inputs.len(), input_dim, |r, col| if c.inputs[r] == col { 1.0 } else { 0.0 });
                ops::with_input_map(&network::deepen(net, depth)?, &sel)
            })
            .collect();
        Ok((network::parallel(&selected?)?, StageReport { sup_bound, lipschitz, depth }))
    }
}

/// Guarantees of one stage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StageReport {
    /// Largest certified sup error among the components.
    pub sup_bound: f64,
    /// Largest Lipschitz constant (max norm) of the exact component maps.
    pub lipschitz: f64,
    /// Depth of the stage approximant.
    pub depth: usize,
}

/// Input to [`build_encoder_decoder`].
#[derive(Debug, Clone)]
pub struct EncoderDecoderSpec {
    pub input_dim: usize,
    pub enc0: Stage,
    pub enc1: Stage,
    pub dec: Stage,
    /// Hidden layer index that must hold the bottleneck.
    pub bottleneck_layer: usize,
    /// Total number of hidden layers.
    pub depth: usize,
}

impl EncoderDecoderSpec {
    /// Exact composed target `f_dec ∘ g_enc1 ∘ g_enc0`.
    pub fn target(&self, x: &[f64]) -> Vec<f64> {
        self.dec.eval(&self.enc1.eval(&self.enc0.eval(x)))
    }

    /// Smallest admissible `(bottleneck_layer, depth)` for the configured stages.
    pub fn minimal_depths(&self) -> Result<(usize, usize)> {
        let d0 = stage_depth(&self.enc0)?;
        let d1 = stage_depth(&self.enc1)?;
        let dd = stage_depth(&self.dec)?;
        let l1 = d0 + d1 + 2;
        Ok((l1, l1 + 1 + dd))
    }
}

fn stage_depth(stage: &Stage) -> Result<usize> {
    let mut depth = 0;
    for c in &stage.components {
        if stage.m < 1 {
            return Err(Error::Precondition("multiplication depth m must be at least 1".into()));
        }
        depth = depth.max(super::builder::approximator_depth(&c.function, stage.m));
    }
    Ok(depth)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EncoderDecoderReport {
    pub enc0: StageReport,
    pub enc1: StageReport,
    pub dec: StageReport,
    /// `e_0 + e_1 + e_dec`.
    pub sum_of_stage_bounds: f64,
    /// `e_dec + Lip_dec (e_1 + Lip_1 e_0)`: the error bound that follows from the stage
    /// bounds once the intermediate values are clamped to `[0,1]`.
    pub propagated_bound: f64,
    pub bottleneck_layer: usize,
    pub bottleneck_width: usize,
    pub depth: usize,
    pub sparsity: usize,
}

/// Assembles `dec ∘ clamp ∘ σ ∘ enc1 ∘ clamp ∘ enc0` with the bottleneck (the `σ`
/// layer, width `d̃`) at hidden layer `bottleneck_layer` and total depth `depth`.
///
/// The exact stage maps must send `[0,1]` inputs into `[0,1]`; the clamps then only
/// move approximate values toward the exact ones.
pub fn build_encoder_decoder(spec: &EncoderDecoderSpec) -> Result<(Network, EncoderDecoderReport)> {
    spec.enc0.check("enc0", spec.input_dim)?;
    spec.enc1.check("enc1", spec.enc0.output_dim())?;
    spec.dec.check("dec", spec.enc1.output_dim())?;
    let (min_l1, min_depth) = spec.minimal_depths()?;
    if spec.bottleneck_layer < min_l1 {
        return Err(Error::Precondition(format!(
            "bottleneck layer {} is too shallow: the encoder stages need at least {min_l1} layers",
            spec.bottleneck_layer
        )));
    }
    if spec.depth < spec.bottleneck_layer + (min_depth - min_l1) {
        return Err(Error::Precondition(format!(
            "depth {} is too small: the decoder needs {} layers after the bottleneck",
            spec.depth,
            min_depth - min_l1
        )));
    }

    let (e0, r0) = spec.enc0.build(spec.input_dim)?;
    let (e1, r1) = spec.enc1.build(spec.enc0.output_dim())?;
    let (dec, rd) = spec.dec.build(spec.enc1.output_dim())?;

    let d_enc = spec.enc0.output_dim();
    let d_tilde = spec.enc1.output_dim();
    let e0 = network::deepen(&e0, spec.bottleneck_layer - r1.depth - 2)?;
    let encoder = network::fuse(&e1, &network::fuse(&clamp_unit(d_enc)?, &e0)?)?;
    let bottleneck = bottleneck_then_clamp(d_tilde)?;
    let encoder = network::fuse(&bottleneck, &encoder)?;
    let dec = network::deepen(&dec, spec.depth - spec.bottleneck_layer - 1)?;
    let net = network::fuse(&dec, &encoder)?;

    let (mut arch, weights, biases) = net.into_parts();
    arch.bottleneck = Some(spec.bottleneck_layer);
    let net = Network::new(arch, weights, biases)?;
    debug_assert_eq!(net.depth(), spec.depth);

    let report = EncoderDecoderReport {
        enc0: r0,
        enc1: r1,
        dec: rd,
        sum_of_stage_bounds: r0.sup_bound + r1.sup_bound + rd.sup_bound,
        propagated_bound: rd.sup_bound + rd.lipschitz * (r1.sup_bound + r1.lipschitz * r0.sup_bound),
        bottleneck_layer: spec.bottleneck_layer,
        bottleneck_width: net.arch().widths[spec.bottleneck_layer],
        depth: net.depth(),
        sparsity: net.sparsity(),
    };
    Ok((net, report))
}

/// `z ↦ min(max(z, 0), 1)` coordinatewise, one hidden layer.
fn clamp_unit(d: usize) -> Result<Network> {
    let mut w0 = DMatrix::zeros(2 * d, d);
    let mut v0 = DVector::zeros(2 * d);
    let mut w1 = DMatrix::zeros(d, 2 * d);
    for j in 0..d {
        w0[(2 * j, j)] = 1.0;
        w0[(2 * j + 1, j)] = 1.0;
        v0[2 * j + 1] = 1.0;
        w1[(j, 2 * j)] = 1.0;
        w1[(j, 2 * j + 1)] = -1.0;
    }
    Network::new(Architecture::new(vec![d, 2 * d, d])?, vec![w0, w1], vec![v0])
}

/// `σ(z)` (width `d`) followed by the upper clamp, two hidden layers.
fn bottleneck_then_clamp(d: usize) -> Result<Network> {
    network::fuse(&clamp_unit(d)?, &{
        let arch = Architecture::new(vec![d, d, d])?;
        Network::new(arch, vec![DMatrix::identity(d, d), DMatrix::identity(d, d)], vec![DVector::zeros(d)])?
    })
}
