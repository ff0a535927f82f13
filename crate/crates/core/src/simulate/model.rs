use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use super::series::Series;
use crate::network::{CompiledNetwork, Network, Scratch};
use crate::{rng, Error, Result};

/// States beyond this magnitude are treated as a blow-up.
const BLOW_UP: f64 = 1e100;

pub type Closure = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// The evolution map `f₀: R^{dr} → R^d`, applied to the lag state `(X_{i-1}, …, X_{i-r})`.
#[derive(Clone)]
pub enum EvolutionMap {
    Zero,
    /// `f₀(x) = v a x` with `v: d × k`, `a: k × dr`.
    LinearRankReduced { v: DMatrix<f64>, a: DMatrix<f64> },
    Network(CompiledNetwork),
    Closure(Closure),
}

impl fmt::Debug for EvolutionMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvolutionMap::Zero => write!(f, "Zero"),
            EvolutionMap::LinearRankReduced { v, a } => {
                write!(f, "LinearRankReduced {{ v: {}x{}, a: {}x{} }}", v.nrows(), v.ncols(), a.nrows(), a.ncols())
            }
            EvolutionMap::Network(n) => write!(f, "Network {{ {} -> {} }}", n.input_dim(), n.output_dim()),
            EvolutionMap::Closure(_) => write!(f, "Closure"),
        }
    }
}

/// `X_i = f₀(𝕏_{i-1}) + ε_i` with `ε_i ~ N(0, noise_sd² I)` i.i.d.
///
/// Gaussian noise is subgaussian with constant proportional to `noise_sd`.
#[derive(Debug, Clone)]
pub struct TimeSeriesModel {
    pub d: usize,
    pub r: usize,
    pub f0: EvolutionMap,
    pub noise_sd: f64,
    pub seed: u64,
}

impl TimeSeriesModel {
    pub fn new(d: usize, r: usize, f0: EvolutionMap, noise_sd: f64, seed: u64) -> Result<Self> {
        let model = TimeSeriesModel { d, r, f0, noise_sd, seed };
        model.validate()?;
        Ok(model)
    }

    pub fn zero(d: usize, r: usize, noise_sd: f64, seed: u64) -> Result<Self> {
        Self::new(d, r, EvolutionMap::Zero, noise_sd, seed)
    }

    /// `f₀(x) = v a x`; `r` is read off the shapes.
    pub fn linear(v: DMatrix<f64>, a: DMatrix<f64>, noise_sd: f64, seed: u64) -> Result<Self> {
        let d = v.nrows();
        if d == 0 || !a.ncols().is_multiple_of(d) {
            return Err(Error::Precondition(format!(
                "a has {} columns, not a multiple of the dimension {d}",
                a.ncols()
            )));
        }
        let r = a.ncols() / d;
        Self::new(d, r, EvolutionMap::LinearRankReduced { v, a }, noise_sd, seed)
    }

    pub fn from_network(net: &Network, r: usize, noise_sd: f64, seed: u64) -> Result<Self> {
        let d = net.output_dim();
        Self::new(d, r, EvolutionMap::Network(CompiledNetwork::from(net)), noise_sd, seed)
    }

    /// Scalar AR(1) `X_i = a X_{i-1} + σ ε_i`.
    pub fn ar1(a: f64, sd: f64, seed: u64) -> Result<Self> {
        Self::linear(DMatrix::from_element(1, 1, 1.0), DMatrix::from_element(1, 1, a), sd, seed)
    }

    pub fn input_dim(&self) -> usize {
        self.d * self.r
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 || self.r == 0 {
            return Err(Error::Precondition("model dimension and lag count must be positive".into()));
        }
        if !(self.noise_sd >= 0.0) || !self.noise_sd.is_finite() {
            return Err(Error::Precondition(format!("noise_sd must be finite and nonnegative, got {}", self.noise_sd)));
        }
        match &self.f0 {
            EvolutionMap::LinearRankReduced { v, a } => {
                if v.nrows() != self.d {
                    return Err(Error::dim("rows of v", self.d, v.nrows()));
                }
                if a.nrows() != v.ncols() {
                    return Err(Error::dim("rows of a (columns of v)", v.ncols(), a.nrows()));
                }
                if a.ncols() != self.input_dim() {
                    return Err(Error::dim("columns of a", self.input_dim(), a.ncols()));
                }
            }
            EvolutionMap::Network(n) => {
                if n.input_dim() != self.input_dim() {
                    return Err(Error::dim("network input", self.input_dim(), n.input_dim()));
                }
                if n.output_dim() != self.d {
                    return Err(Error::dim("network output", self.d, n.output_dim()));
                }
            }
            EvolutionMap::Zero | EvolutionMap::Closure(_) => {}
        }
        Ok(())
    }

    /// Evaluates `f₀` on a lag state.
    pub fn apply(&self, state: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.d];
        self.apply_into(state, &mut out, &mut Scratch::default())?;
        Ok(out)
    }

    pub(crate) fn apply_into(&self, state: &[f64], out: &mut [f64], scratch: &mut Scratch) -> Result<()> {
        match &self.f0 {
            EvolutionMap::Zero => out.fill(0.0),
            EvolutionMap::LinearRankReduced { v, a } => {
                let z = a * DVector::from_column_slice(state);
                out.copy_from_slice((v * z).as_slice());
            }
            EvolutionMap::Network(n) => out.copy_from_slice(n.eval_with(state, scratch)?),
            EvolutionMap::Closure(f) => {
                let y = f(state);
                if y.len() != self.d {
                    return Err(Error::dim("closure output", self.d, y.len()));
                }
                out.copy_from_slice(&y);
            }
        }
        Ok(())
    }

    /// Companion matrix of a linear model, acting on the stacked lag state.
    pub fn companion(&self) -> Option<DMatrix<f64>> {
        let EvolutionMap::LinearRankReduced { v, a } = &self.f0 else { return None };
        let k = self.input_dim();
        let mut c = DMatrix::zeros(k, k);
        c.view_mut((0, 0), (self.d, k)).copy_from(&(v * a));
        for i in self.d..k {
            c[(i, i - self.d)] = 1.0;
        }
        Some(c)
    }

    /// Spectral radius of the companion matrix; below 1 means the linear recursion is stable.
    pub fn spectral_radius(&self) -> Option<f64> {
        let c = self.companion()?;
        Some(c.complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max))
    }

    /// Stationary per-coordinate standard deviation of a stable linear model.
    pub fn stationary_sd(&self) -> Option<Vec<f64>> {
        if self.spectral_radius()? >= 1.0 {
            return None;
        }
        let c = self.companion()?;
        let k = c.nrows();
        let mut sigma = DMatrix::zeros(k, k);
        for i in 0..self.d {
            sigma[(i, i)] = self.noise_sd * self.noise_sd;
        }
        // Σ = Σ_j C^j Q C^jᵀ by doubling: S_{2m} = S_m + C^m S_m (C^m)ᵀ
        let mut power = c;
        for _ in 0..64 {
            let next = &sigma + &power * &sigma * power.transpose();
            let change = (&next - &sigma).amax();
            sigma = next;
            power = &power * &power;
            if change <= 1e-15 * sigma.amax() {
                break;
            }
        }
        Some((0..self.d).map(|i| sigma[(i, i)].sqrt()).collect())
    }

    fn blow_up_error(&self, step: usize) -> Error {
        let diag = match self.spectral_radius() {
            Some(rho) => format!("; companion spectral radius {rho:.6} (stable iff < 1)"),
            None => String::new(),
        };
        Error::Numeric(format!("series diverged at step {step}{diag}"))
    }
}

/// Advances a lag state in place.
pub(crate) struct Stepper<'m> {
    model: &'m TimeSeriesModel,
    state: Vec<f64>,
    next: Vec<f64>,
    scratch: Scratch,
    steps: usize,
}

impl<'m> Stepper<'m> {
    pub(crate) fn new(model: &'m TimeSeriesModel) -> Self {
        Stepper {
            model,
            state: vec![0.0; model.input_dim()],
            next: vec![0.0; model.d],
            scratch: Scratch::default(),
            steps: 0,
        }
    }

    pub(crate) fn state(&self) -> &[f64] {
        &self.state
    }

    pub(crate) fn set_state(&mut self, state: &[f64]) {
        self.state.copy_from_slice(state);
    }

    /// `X = f₀(state) + noise`, pushed as the newest lag; returns `X`.
    pub(crate) fn step_with(&mut self, noise: &[f64]) -> Result<&[f64]> {
        let d = self.model.d;
        self.model.apply_into(&self.state, &mut self.next, &mut self.scratch)?;
        for (x, e) in self.next.iter_mut().zip(noise) {
            *x += e;
        }
        self.steps += 1;
        if self.next.iter().any(|v| !(v.abs() < BLOW_UP)) {
            return Err(self.model.blow_up_error(self.steps));
        }
        let len = self.state.len();
        self.state.copy_within(0..len - d, d);
        self.state[..d].copy_from_slice(&self.next);
        Ok(&self.state[..d])
    }

    pub(crate) fn step<R: Rng>(&mut self, rng: &mut R, noise: &mut [f64]) -> Result<&[f64]> {
        draw_noise(rng, self.model.noise_sd, noise);
        self.step_with(noise)
    }
}

pub(crate) fn draw_noise<R: Rng>(rng: &mut R, sd: f64, out: &mut [f64]) {
    for e in out.iter_mut() {
        let z: f64 = rng.sample(StandardNormal);
        *e = sd * z;
    }
}

/// Default number of discarded steps before a series is recorded.
pub const DEFAULT_BURN_IN: usize = 1000;

/// Runs the recursion from zero lags for `burn_in` discarded steps, then records `n`.
pub fn generate(model: &TimeSeriesModel, n: usize, burn_in: usize) -> Result<Series> {
    model.validate()?;
    if n < model.r + 1 {
        return Err(Error::Precondition(format!("series length {n} must be at least r + 1 = {}", model.r + 1)));
    }
    let mut rng = rng::stream(model.seed, rng::STREAM_GENERATE);
    let mut stepper = Stepper::new(model);
    let mut noise = vec![0.0; model.d];
    for _ in 0..burn_in {
        stepper.step(&mut rng, &mut noise)?;
    }
    let mut values = Vec::with_capacity(n * model.d);
    for _ in 0..n {
        values.extend_from_slice(stepper.step(&mut rng, &mut noise)?);
    }
    Series::new(model.d, values)
}

/// The five-dimensional rank-one model `f₀(x) = v a x`.
pub fn low_d_model(seed: u64) -> TimeSeriesModel {
    let a = DMatrix::from_row_slice(1, 5, &[0.5, 0.6, 0.2, 0.3, 0.5]);
    let v = DMatrix::from_column_slice(5, 1, &[0.4, 0.6, 0.5, -0.2, 0.5]);
    TimeSeriesModel::linear(v, a, 0.5, seed).expect("fixed shapes")
}

/// The thirty-dimensional rank-two model `f₀(x) = v a x`.
pub fn high_d_model(seed: u64) -> TimeSeriesModel {
    let s: Vec<f64> = (0..24).map(|j| if j % 2 == 0 { 0.05 } else { -0.05 }).collect();
    let row1: Vec<f64> = [&[0.3, 0.6, 0.5][..], &s, &[0.0, -1.0, 0.4]].concat();
    let row2: Vec<f64> = [&[0.5, -0.6, 0.2][..], &s, &[0.4, 0.9, 1.0]].concat();
    let a = DMatrix::from_row_slice(2, 30, &[row1, row2].concat());
    let v = DMatrix::from_fn(30, 2, |i, j| match (j, i % 2) {
        (0, _) => 0.4,
        (_, 0) => 0.5,
        _ => -0.3,
    });
    TimeSeriesModel::linear(v, a, 0.5, seed).expect("fixed shapes")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_model_without_noise_is_zero() {
        let m = TimeSeriesModel::zero(3, 2, 0.0, 1).unwrap();
        let s = generate(&m, 50, 10).unwrap();
        assert!(s.values().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn presets() {
        let low = low_d_model(0);
        assert_eq!((low.d, low.r), (5, 1));
        // rank one: the only nonzero eigenvalue is a·v = 0.85
        assert!((low.spectral_radius().unwrap() - 0.85).abs() < 1e-12);
        let high = high_d_model(0);
        assert_eq!((high.d, high.r), (30, 1));
        let EvolutionMap::LinearRankReduced { v, a } = &high.f0 else { panic!() };
        assert_eq!((v.ncols(), a.nrows()), (2, 2));
        assert_eq!(a[(0, 3)], 0.05);
        assert_eq!(a[(0, 4)], -0.05);
        assert_eq!(a[(1, 29)], 1.0);
        assert_eq!((v[(0, 1)], v[(1, 1)], v[(29, 0)]), (0.5, -0.3, 0.4));
        // the eigenvalues of v a are those of the 2 × 2 matrix a v
        let av = a * v;
        let small = av.complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!((high.spectral_radius().unwrap() - small).abs() < 1e-9);
        assert!(small < 1.0);
    }

    #[test]
    fn generation_is_deterministic() {
        let a = generate(&low_d_model(9), 200, 100).unwrap();
        let b = generate(&low_d_model(9), 200, 100).unwrap();
        let c = generate(&low_d_model(10), 200, 100).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(generate(&low_d_model(9), 1, 100).is_err());
    }

    #[test]
    fn unstable_model_reports_spectral_radius() {
        let m = TimeSeriesModel::ar1(1.5, 1.0, 0).unwrap();
        let err = generate(&m, 10, 5000).unwrap_err();
        assert!(err.is_numeric());
        assert!(err.to_string().contains("spectral radius 1.5"), "{err}");
    }

    #[test]
    fn ar1_stationary_sd() {
        let m = TimeSeriesModel::ar1(0.7, 2.0, 0).unwrap();
        let sd = m.stationary_sd().unwrap()[0];
        assert!((sd - 2.0 / (1.0 - 0.49f64).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn lag_two_network_model() {
        // f₀(x) = (x₁ + x₂)/4 through an identity-like net on two lags
        let net = crate::network::ops::with_output_map(
            &Network::identity(2),
            &DMatrix::from_row_slice(1, 2, &[0.25, 0.25]),
        )
        .unwrap();
        let m = TimeSeriesModel::from_network(&net, 2, 0.0, 0).unwrap();
        assert_eq!(m.apply(&[1.0, 3.0]).unwrap(), vec![1.0]);
        assert!(TimeSeriesModel::from_network(&net, 1, 0.0, 0).is_err());
    }
}
