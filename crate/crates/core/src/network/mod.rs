//! Feedforward ReLU networks with an optional bottleneck layer.
//!
//! A network with architecture `(L, p)` computes
//!
//! ```text
//! f(x) = W_L σ_{v_L} W_{L-1} … σ_{v_1} W_0 x,     σ_v(z)_j = max(z_j - v_j, 0)
//! ```
//!
//! `weights[i]` is a `p[i+1] × p[i]` matrix acting by left multiplication and
//! `biases[i]` (length `p[i+1]`) is the shift of hidden layer `i + 1`. The output layer
//! is purely linear.

mod interval;
mod io;
pub(crate) mod ops;
mod sparse;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, Uniform};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use io::FORMAT_TAG;
pub use ops::{compose, deepen, fuse, parallel};
pub use sparse::{CompiledNetwork, Scratch};

/// Shape and class constraints of a network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Architecture {
    /// Number of hidden layers.
    #[serde(rename = "L")]
    pub depth: usize,
    /// Index (1-based) of the bottleneck hidden layer.
    #[serde(rename = "L1", default, skip_serializing_if = "Option::is_none")]
    pub bottleneck: Option<usize>,
    /// Widths `p_0, …, p_{L+1}`.
    #[serde(rename = "p")]
    pub widths: Vec<usize>,
    /// Maximal number of nonzero parameters.
    #[serde(rename = "s", default, skip_serializing_if = "Option::is_none")]
    pub sparsity_budget: Option<usize>,
    /// Cap on the sup norm of the network function over the unit cube.
    #[serde(rename = "F", default, skip_serializing_if = "Option::is_none")]
    pub sup_bound: Option<f64>,
    /// Cap on the Lipschitz constant with respect to the max norm.
    #[serde(rename = "Lip", default, skip_serializing_if = "Option::is_none")]
    pub lipschitz_bound: Option<f64>,
}

impl Architecture {
    pub fn new(widths: Vec<usize>) -> Result<Self> {
        let arch = Architecture {
            depth: widths.len().saturating_sub(2),
            bottleneck: None,
            widths,
            sparsity_budget: None,
            sup_bound: None,
            lipschitz_bound: None,
        };
        arch.validate()?;
        Ok(arch)
    }

    pub fn with_bottleneck(mut self, layer: usize) -> Result<Self> {
        self.bottleneck = Some(layer);
        self.validate()?;
        Ok(self)
    }

    pub fn with_sparsity(mut self, s: usize) -> Self {
        self.sparsity_budget = Some(s);
        self
    }

    pub fn with_sup_bound(mut self, f: f64) -> Self {
        self.sup_bound = Some(f);
        self
    }

    pub fn with_lipschitz_bound(mut self, lip: f64) -> Self {
        self.lipschitz_bound = Some(lip);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.widths.len() < 2 {
            return Err(Error::Architecture(format!(
                "width vector needs at least 2 entries, got {}",
                self.widths.len()
            )));
        }
        if self.widths.len() != self.depth + 2 {
            return Err(Error::Architecture(format!(
                "width vector has {} entries but L = {} requires {}",
                self.widths.len(),
                self.depth,
                self.depth + 2
            )));
        }
        if let Some(i) = self.widths.iter().position(|&w| w == 0) {
            return Err(Error::Architecture(format!("width p[{i}] is zero")));
        }
        if let Some(l1) = self.bottleneck {
            if l1 == 0 || l1 > self.depth {
                return Err(Error::Architecture(format!(
                    "bottleneck layer {l1} outside 1..={}",
                    self.depth
                )));
            }
        }
        for (name, v) in [("F", self.sup_bound), ("Lip", self.lipschitz_bound)] {
            if let Some(v) = v {
                if !(v > 0.0) {
                    return Err(Error::Architecture(format!("{name} must be positive, got {v}")));
                }
            }
        }
        Ok(())
    }

    pub fn input_dim(&self) -> usize {
        self.widths[0]
    }

    pub fn output_dim(&self) -> usize {
        self.widths[self.depth + 1]
    }

    /// Width of the bottleneck layer, if one is declared.
    pub fn bottleneck_width(&self) -> Option<usize> {
        self.bottleneck.map(|l1| self.widths[l1])
    }
}

/// A feedforward ReLU network.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    arch: Architecture,
    weights: Vec<DMatrix<f64>>,
    biases: Vec<DVector<f64>>,
}

impl Network {
    /// Assembles a network, checking every shape against `arch`.
    pub fn new(arch: Architecture, weights: Vec<DMatrix<f64>>, biases: Vec<DVector<f64>>) -> Result<Self> {
        arch.validate()?;
        let l = arch.depth;
        if weights.len() != l + 1 {
            return Err(Error::Architecture(format!(
                "expected {} weight matrices, got {}",
                l + 1,
                weights.len()
            )));
        }
        if biases.len() != l {
            return Err(Error::Architecture(format!(
                "expected {l} bias vectors, got {}",
                biases.len()
            )));
        }
        for (i, w) in weights.iter().enumerate() {
            let (rows, cols) = (arch.widths[i + 1], arch.widths[i]);
            if w.shape() != (rows, cols) {
                return Err(Error::Architecture(format!(
                    "weights[{i}] has shape {:?}, expected ({rows}, {cols})",
                    w.shape()
                )));
            }
        }
        for (i, b) in biases.iter().enumerate() {
            if b.len() != arch.widths[i + 1] {
                return Err(Error::Architecture(format!(
                    "biases[{i}] has length {}, expected {}",
                    b.len(),
                    arch.widths[i + 1]
                )));
            }
        }
        Ok(Network { arch, weights, biases })
    }

    /// Network with every parameter zero.
    pub fn zeros(arch: Architecture) -> Result<Self> {
        arch.validate()?;
        let weights = (0..=arch.depth)
            .map(|i| DMatrix::zeros(arch.widths[i + 1], arch.widths[i]))
            .collect();
        let biases = (0..arch.depth).map(|i| DVector::zeros(arch.widths[i + 1])).collect();
        Network::new(arch, weights, biases)
    }

    /// The linear identity map on `R^d` (no hidden layers).
    pub fn identity(d: usize) -> Self {
        let arch = Architecture::new(vec![d, d]).expect("identity architecture is valid");
        Network::new(arch, vec![DMatrix::identity(d, d)], vec![]).expect("identity shapes")
    }

    /// Seeded initialisation: every weight and bias of layer `i` is drawn from
    /// `U(-1/sqrt(p_i), 1/sqrt(p_i))`.
    pub fn random<R: Rng + ?Sized>(arch: Architecture, rng: &mut R) -> Result<Self> {
        arch.validate()?;
        let mut weights = Vec::with_capacity(arch.depth + 1);
        let mut biases = Vec::with_capacity(arch.depth);
        for i in 0..=arch.depth {
            let fan_in = arch.widths[i];
            let bound = 1.0 / (fan_in as f64).sqrt();
            let dist = Uniform::new_inclusive(-bound, bound).expect("finite bound");
            let rows = arch.widths[i + 1];
            weights.push(DMatrix::from_fn(rows, fan_in, |_, _| dist.sample(rng)));
            if i < arch.depth {
                biases.push(DVector::from_fn(rows, |_, _| dist.sample(rng)));
            }
        }
        Network::new(arch, weights, biases)
    }

    /// Training initialisation: weights of layer `i` drawn from
    /// `U(-1/sqrt(p_i), 1/sqrt(p_i))`, every shift zero so each hidden unit starts
    /// active on half of the input space.
    pub fn initial<R: Rng + ?Sized>(arch: Architecture, rng: &mut R) -> Result<Self> {
        let mut net = Network::random(arch, rng)?;
        for b in &mut net.biases {
            b.fill(0.0);
        }
        Ok(net)
    }

    pub fn arch(&self) -> &Architecture {
        &self.arch
    }

    /// Replaces the class constraints (s, F, Lip, bottleneck) keeping the shapes.
    pub fn set_class(&mut self, mut arch: Architecture) -> Result<()> {
        if arch.widths != self.arch.widths {
            return Err(Error::Architecture(format!(
                "class widths {:?} differ from network widths {:?}",
                arch.widths, self.arch.widths
            )));
        }
        arch.depth = self.arch.depth;
        arch.validate()?;
        self.arch = arch;
        Ok(())
    }

    pub fn depth(&self) -> usize {
        self.arch.depth
    }

    pub fn input_dim(&self) -> usize {
        self.arch.input_dim()
    }

    pub fn output_dim(&self) -> usize {
        self.arch.output_dim()
    }

    pub fn weights(&self) -> &[DMatrix<f64>] {
        &self.weights
    }

    pub fn biases(&self) -> &[DVector<f64>] {
        &self.biases
    }

    pub fn weights_mut(&mut self) -> &mut [DMatrix<f64>] {
        &mut self.weights
    }

    pub fn biases_mut(&mut self) -> &mut [DVector<f64>] {
        &mut self.biases
    }

    pub(crate) fn into_parts(self) -> (Architecture, Vec<DMatrix<f64>>, Vec<DVector<f64>>) {
        (self.arch, self.weights, self.biases)
    }

    /// Number of trainable scalars.
    pub fn parameter_count(&self) -> usize {
        self.weights.iter().map(|w| w.len()).sum::<usize>() + self.biases.iter().map(|b| b.len()).sum::<usize>()
    }

    /// Evaluates the network at `x`.
    pub fn eval(&self, x: &[f64]) -> Result<DVector<f64>> {
        self.check_input(x.len())?;
        Ok(self.forward_from(0, DVector::from_column_slice(x)))
    }

    pub(crate) fn check_input(&self, got: usize) -> Result<()> {
        if got != self.input_dim() {
            return Err(Error::dim("input to layer 0 (weights[0])", self.input_dim(), got));
        }
        Ok(())
    }

    /// Runs the layers starting at weight matrix `start` on the given activation.
    pub(crate) fn forward_from(&self, start: usize, mut h: DVector<f64>) -> DVector<f64> {
        for i in start..self.arch.depth {
            let mut z = &self.weights[i] * &h;
            for (zj, vj) in z.iter_mut().zip(self.biases[i].iter()) {
                *zj = (*zj - vj).max(0.0);
            }
            h = z;
        }
        &self.weights[self.arch.depth] * h
    }

    /// Activations of the bottleneck layer `L1`, i.e. `σ_{v_{L1}} W_{L1-1} … σ_{v_1} W_0 x`.
    pub fn eval_encoder(&self, x: &[f64]) -> Result<DVector<f64>> {
        let l1 = self
            .arch
            .bottleneck
            .ok_or_else(|| Error::Architecture("network has no bottleneck layer L1".into()))?;
        self.check_input(x.len())?;
        let mut h = DVector::from_column_slice(x);
        for i in 0..l1 {
            let mut z = &self.weights[i] * &h;
            for (zj, vj) in z.iter_mut().zip(self.biases[i].iter()) {
                *zj = (*zj - vj).max(0.0);
            }
            h = z;
        }
        Ok(h)
    }

    /// The decoder suffix applied to bottleneck activations: `eval = eval_decoder ∘ eval_encoder`.
    pub fn eval_decoder(&self, h: &[f64]) -> Result<DVector<f64>> {
        let l1 = self
            .arch
            .bottleneck
            .ok_or_else(|| Error::Architecture("network has no bottleneck layer L1".into()))?;
        if h.len() != self.arch.widths[l1] {
            return Err(Error::dim(format!("bottleneck input to weights[{l1}]"), self.arch.widths[l1], h.len()));
        }
        Ok(self.forward_from(l1, DVector::from_column_slice(h)))
    }

    /// Exact count of nonzero weight and bias entries.
    pub fn sparsity(&self) -> usize {
        let w: usize = self.weights.iter().map(|m| m.iter().filter(|v| **v != 0.0).count()).sum();
        let b: usize = self.biases.iter().map(|m| m.iter().filter(|v| **v != 0.0).count()).sum();
        w + b
    }

    /// Largest absolute weight or bias entry.
    pub fn max_abs_entry(&self) -> f64 {
        self.weights
            .iter()
            .flat_map(|m| m.iter())
            .chain(self.biases.iter().flat_map(|b| b.iter()))
            .fold(0.0_f64, |acc, v| acc.max(v.abs()))
    }

    /// Certified upper bound on the max-norm Lipschitz constant: the product of the
    /// induced ∞-norms (maximal absolute row sums) of all weight matrices.
    pub fn lipschitz_upper(&self) -> f64 {
        self.weights
            .iter()
            .map(|w| {
                (0..w.nrows())
                    .map(|r| w.row(r).iter().map(|v| v.abs()).sum::<f64>())
                    .fold(0.0_f64, f64::max)
            })
            .product()
    }

    /// Largest observed ratio `|f(x) - f(x')|_∞ / |x - x'|_∞` over the given pairs.
    /// This is a lower bound on the Lipschitz constant.
    pub fn lipschitz_empirical(&self, pairs: &[(Vec<f64>, Vec<f64>)]) -> Result<f64> {
        let compiled = CompiledNetwork::from(self);
        let mut best = 0.0_f64;
        for (x, y) in pairs {
            let dx = max_abs_diff(x, y);
            if dx == 0.0 {
                continue;
            }
            let fx = compiled.eval(x)?;
            let fy = compiled.eval(y)?;
            best = best.max(max_abs_diff(&fx, &fy) / dx);
        }
        Ok(best)
    }

    /// Certified bound on `sup_{x ∈ [0,1]^{p_0}} |f(x)|_∞` by interval propagation.
    pub fn sup_norm_upper(&self) -> f64 {
        interval::unit_cube_sup(self)
    }

    /// Checks membership in the class described by `class` (widths, bottleneck, entry
    /// bound 1, sparsity budget, sup-norm cap, Lipschitz cap).
    ///
    /// The sup-norm and Lipschitz checks use certified upper bounds, so a network that
    /// passes is guaranteed to be in the class; a reported violation of those two caps
    /// only means membership could not be certified.
    pub fn class_report(&self, class: &Architecture) -> ClassReport {
        let mut violations = Vec::new();
        if class.widths != self.arch.widths {
            violations.push(format!("widths {:?} differ from class widths {:?}", self.arch.widths, class.widths));
        }
        if let Some(l1) = class.bottleneck {
            if self.arch.bottleneck != Some(l1) {
                violations.push(format!("bottleneck {:?} differs from class bottleneck {l1}", self.arch.bottleneck));
            }
        }
        let max_entry = self.max_abs_entry();
        if max_entry > 1.0 {
            violations.push(format!("max |entry| = {max_entry} exceeds 1"));
        }
        let sparsity = self.sparsity();
        if let Some(s) = class.sparsity_budget {
            if sparsity > s {
                violations.push(format!("{sparsity} nonzero parameters exceed budget {s}"));
            }
        }
        let sup_upper = class.sup_bound.map(|_| self.sup_norm_upper());
        if let (Some(cap), Some(ub)) = (class.sup_bound, sup_upper) {
            if ub > cap {
                violations.push(format!("certified sup bound {ub} exceeds F = {cap}"));
            }
        }
        let lip_upper = class.lipschitz_bound.map(|_| self.lipschitz_upper());
        if let (Some(cap), Some(ub)) = (class.lipschitz_bound, lip_upper) {
            if ub > cap {
                violations.push(format!("certified Lipschitz bound {ub} exceeds Lip = {cap}"));
            }
        }
        ClassReport {
            max_abs_entry: max_entry,
            sparsity,
            sup_norm_upper: sup_upper,
            lipschitz_upper: lip_upper,
            violations,
        }
    }

    pub fn is_in_class(&self, class: &Architecture) -> bool {
        self.class_report(class).violations.is_empty()
    }
}

/// Outcome of [`Network::class_report`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassReport {
    pub max_abs_entry: f64,
    pub sparsity: usize,
    pub sup_norm_upper: Option<f64>,
    pub lipschitz_upper: Option<f64>,
    pub violations: Vec<String>,
}

fn max_abs_diff<'a>(a: impl IntoIterator<Item = &'a f64>, b: impl IntoIterator<Item = &'a f64>) -> f64 {
    a.into_iter().zip(b).fold(0.0_f64, |acc, (x, y)| acc.max((x - y).abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use nalgebra::dmatrix;
    use nalgebra::dvector;

    fn relu_scalar() -> Network {
        let arch = Architecture::new(vec![1, 1, 1]).unwrap();
        Network::new(arch, vec![dmatrix![1.0], dmatrix![1.0]], vec![dvector![0.0]]).unwrap()
    }

    /// Straight-line oracle: index-based loops, no nalgebra products.
    fn oracle_eval(net: &Network, x: &[f64], upto: Option<usize>) -> Vec<f64> {
        let mut h = x.to_vec();
        let layers = upto.unwrap_or(net.depth());
        for i in 0..layers {
            let w = &net.weights()[i];
            let mut z = vec![0.0; w.nrows()];
            for r in 0..w.nrows() {
                let mut acc = 0.0;
                for c in 0..w.ncols() {
                    acc += w[(r, c)] * h[c];
                }
                z[r] = f64::max(acc - net.biases()[i][r], 0.0);
            }
            h = z;
        }
        if upto.is_some() {
            return h;
        }
        let w = &net.weights()[net.depth()];
        (0..w.nrows()).map(|r| (0..w.ncols()).map(|c| w[(r, c)] * h[c]).sum()).collect()
    }

    #[test]
    fn identity_network_is_identity() {
        let net = Network::identity(3);
        let y = net.eval(&[1.0, -2.0, 3.0]).unwrap();
        assert_eq!(y.as_slice(), &[1.0, -2.0, 3.0]);
        assert_eq!(net.sparsity(), 3);
        assert_eq!(net.lipschitz_upper(), 1.0);
    }

    #[test]
    fn scalar_relu() {
        let net = relu_scalar();
        assert_eq!(net.eval(&[-2.0]).unwrap()[0], 0.0);
        assert_eq!(net.eval(&[3.0]).unwrap()[0], 3.0);
    }

    #[test]
    fn eval_rejects_wrong_input_dim() {
        let err = Network::identity(3).eval(&[1.0]).unwrap_err();
        assert!(err.to_string().contains("layer 0"), "{err}");
    }

    #[test]
    fn random_net_matches_oracle() {
        let mut rng = rng::stream(11, 0);
        for trial in 0..100 {
            let widths = if trial == 0 { vec![2, 3, 2] } else { vec![2 + trial % 3, 4, 1 + trial % 2, 3] };
            let net = Network::random(Architecture::new(widths.clone()).unwrap(), &mut rng).unwrap();
            let x: Vec<f64> = (0..widths[0]).map(|_| rng.random_range(-2.0..2.0)).collect();
            let got = net.eval(&x).unwrap();
            let want = oracle_eval(&net, &x, None);
            for (g, w) in got.iter().zip(&want) {
                assert!((g - w).abs() <= 1e-12, "{g} vs {w}");
            }
        }
    }

    #[test]
    fn encoder_identity_propagation() {
        let arch = Architecture::new(vec![3, 3, 3, 3]).unwrap().with_bottleneck(1).unwrap();
        let net = Network::new(
            arch,
            vec![DMatrix::identity(3, 3); 3],
            vec![DVector::zeros(3), DVector::zeros(3)],
        )
        .unwrap();
        let x = [0.1, 0.7, 1.0];
        assert_eq!(net.eval_encoder(&x).unwrap().as_slice(), &x);
    }

    #[test]
    fn encoder_matches_truncated_oracle_and_composes_with_decoder() {
        let mut rng = rng::stream(12, 0);
        let arch = Architecture::new(vec![2, 3, 2]).unwrap().with_bottleneck(1).unwrap();
        let net = Network::random(arch, &mut rng).unwrap();
        for _ in 0..50 {
            let x = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
            let enc = net.eval_encoder(&x).unwrap();
            let want = oracle_eval(&net, &x, Some(1));
            for (g, w) in enc.iter().zip(&want) {
                assert!((g - w).abs() <= 1e-12);
            }
            let full = net.eval(&x).unwrap();
            let dec = net.eval_decoder(enc.as_slice()).unwrap();
            assert!((full - dec).amax() <= 1e-12);
        }
    }

    #[test]
    fn encoder_requires_bottleneck() {
        assert!(relu_scalar().eval_encoder(&[1.0]).is_err());
    }

    #[test]
    fn sparsity_counts() {
        let arch = Architecture::new(vec![2, 3, 2]).unwrap();
        assert_eq!(Network::zeros(arch.clone()).unwrap().sparsity(), 0);
        let mut rng = rng::stream(13, 0);
        let mut net = Network::random(arch, &mut rng).unwrap();
        for w in net.weights_mut() {
            for v in w.iter_mut() {
                if rng.random_bool(0.5) {
                    *v = 0.0;
                }
            }
        }
        net.biases_mut()[0][1] = 0.0;
        let mut scan = 0;
        for w in net.weights() {
            for r in 0..w.nrows() {
                for c in 0..w.ncols() {
                    if w[(r, c)] != 0.0 {
                        scan += 1;
                    }
                }
            }
        }
        for b in net.biases() {
            for i in 0..b.len() {
                if b[i] != 0.0 {
                    scan += 1;
                }
            }
        }
        assert_eq!(net.sparsity(), scan);
    }

    #[test]
    fn lipschitz_row_sum() {
        let arch = Architecture::new(vec![2, 2]).unwrap();
        let net = Network::new(arch, vec![dmatrix![2.0, 0.0; 0.0, 3.0]], vec![]).unwrap();
        assert_eq!(net.lipschitz_upper(), 3.0);
    }

    #[test]
    fn lipschitz_empirical_below_upper() {
        let mut rng = rng::stream(14, 0);
        for _ in 0..5 {
            let net = Network::random(Architecture::new(vec![3, 8, 4, 2]).unwrap(), &mut rng).unwrap();
            let pairs: Vec<_> = (0..10_000)
                .map(|_| {
                    let x: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
                    let y: Vec<f64> = x.iter().map(|v| v + rng.random_range(-0.1..0.1)).collect();
                    (x, y)
                })
                .collect();
            let low = net.lipschitz_empirical(&pairs).unwrap();
            assert!(low <= net.lipschitz_upper() + 1e-12);
        }
    }

    #[test]
    fn lipschitz_of_deep_clipped_net_is_finite() {
        let widths = vec![64; 66];
        let arch = Architecture::new(widths).unwrap();
        let mut net = Network::zeros(arch).unwrap();
        for w in net.weights_mut() {
            w.fill(1.0);
        }
        let ub = net.lipschitz_upper();
        assert!(ub.is_finite());
        assert_eq!(ub, 2f64.powi(390));
    }

    #[test]
    fn class_report_flags_violations() {
        let arch = Architecture::new(vec![2, 2]).unwrap();
        let net = Network::new(arch.clone(), vec![dmatrix![2.0, 0.0; 0.0, 0.5]], vec![]).unwrap();
        let class = arch.clone().with_sparsity(1);
        let report = net.class_report(&class);
        assert_eq!(report.violations.len(), 2);
        assert!(!net.is_in_class(&class));
        let ok = Network::new(arch.clone(), vec![dmatrix![1.0, 0.0; 0.0, 0.5]], vec![]).unwrap();
        assert!(ok.is_in_class(&arch.with_sparsity(2).with_sup_bound(1.0).with_lipschitz_bound(1.0)));
    }

    #[test]
    fn architecture_validation() {
        assert!(Architecture::new(vec![3]).is_err());
        assert!(Architecture::new(vec![3, 0, 1]).is_err());
        assert!(Architecture::new(vec![3, 2, 1]).unwrap().with_bottleneck(2).is_err());
        let a = Architecture::new(vec![5, 20, 10, 1, 10, 20, 5]).unwrap().with_bottleneck(3).unwrap();
        assert_eq!(a.depth, 5);
        assert_eq!(a.bottleneck_width(), Some(1));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn zeroing_never_breaks_sparsity_budget(seed in 0u64..1000, layer in 0usize..3, idx in 0usize..64) {
                let mut rng = rng::stream(seed, 0);
                let arch = Architecture::new(vec![3, 4, 4, 2]).unwrap();
                let mut net = Network::random(arch.clone(), &mut rng).unwrap();
                let class = arch.with_sparsity(net.sparsity());
                prop_assert!(net.class_report(&class).sparsity <= class.sparsity_budget.unwrap());
                let w = &mut net.weights_mut()[layer];
                let n = w.len();
                w.as_mut_slice()[idx % n] = 0.0;
                prop_assert!(net.sparsity() <= class.sparsity_budget.unwrap());
            }
        }
    }
}
