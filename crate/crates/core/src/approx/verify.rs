//! Measured errors of built approximants on the unit cube.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::builder::{build_approximator, ApproxPlan, TheoreticalBounds};
use super::holder::HolderFunction;
use crate::network::{CompiledNetwork, Network, Scratch};
use crate::{rng, Result};

/// Most evaluation points used for a sup-error measurement.
pub const MAX_GRID_POINTS: usize = 1_000_000;

/// Measured-versus-guaranteed summary of an approximant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub function: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub m: usize,
    pub sup_bound: f64,
    pub measured_sup: f64,
    pub lip_bound: f64,
    pub measured_lip: f64,
    pub depth: usize,
    pub depth_bound: usize,
    pub sparsity: usize,
    pub sparsity_bound: f64,
    pub grid_spec: String,
}

impl Certificate {
    /// True when every measured quantity is within its guaranteed bound.
    pub fn holds(&self) -> bool {
        self.measured_sup <= self.sup_bound
            && self.measured_lip <= self.lip_bound
            && self.depth <= self.depth_bound
            && (self.sparsity as f64) <= self.sparsity_bound
    }
}

/// Evaluation points on `[0,1]^t`: the `(side)^t` lattice when it has at most
/// [`MAX_GRID_POINTS`] points, otherwise one uniform draw per cell of the finest lattice
/// under the cap.
#[derive(Debug, Clone)]
pub struct EvalGrid {
    t: usize,
    side: usize,
    stratified: Option<u64>,
}

impl EvalGrid {
    pub fn new(t: usize, side: usize, seed: u64) -> Self {
        let side = side.max(2);
        if (side as f64).powi(t as i32) <= MAX_GRID_POINTS as f64 {
            return EvalGrid { t, side, stratified: None };
        }
        let mut cells = 1;
        while ((cells + 1) as f64).powi(t as i32) <= MAX_GRID_POINTS as f64 {
            cells += 1;
        }
        EvalGrid { t, side: cells, stratified: Some(seed) }
    }

    pub fn len(&self) -> usize {
        self.side.pow(self.t as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn describe(&self) -> String {
        match self.stratified {
            None => format!("lattice {}^{} on [0,1]^{}", self.side, self.t, self.t),
            Some(seed) => format!(
                "stratified {}^{} cells on [0,1]^{}, one uniform point per cell, seed {seed}",
                self.side, self.t, self.t
            ),
        }
    }

    /// The `idx`-th point, written into `out`.
    pub fn point(&self, idx: usize, out: &mut [f64]) {
        let mut rest = idx;
        match self.stratified {
            None => {
                for v in out.iter_mut() {
                    *v = (rest % self.side) as f64 / (self.side - 1) as f64;
                    rest /= self.side;
                }
            }
            Some(seed) => {
                let mut r = rng::lane(seed, idx as u64);
                for v in out.iter_mut() {
                    *v = ((rest % self.side) as f64 + r.random::<f64>()) / self.side as f64;
                    rest /= self.side;
                }
            }
        }
    }
}

/// `max |net(y) - f(y)|` over the grid.
pub fn measure_sup(net: &Network, f: &HolderFunction, grid: &EvalGrid) -> Result<f64> {
    let compiled = CompiledNetwork::from(net);
    net.check_input(grid.t)?;
    let chunk = 4096;
    let worst = (0..grid.len().div_ceil(chunk))
        .into_par_iter()
        .map(|c| {
            let mut scratch = Scratch::default();
            let mut y = vec![0.0; grid.t];
            let mut worst = 0.0_f64;
            for idx in c * chunk..((c + 1) * chunk).min(grid.len()) {
                grid.point(idx, &mut y);
                let out = compiled.eval_with(&y, &mut scratch).expect("dimension checked");
                worst = worst.max((out[0] - f.eval(&y)).abs());
            }
            worst
        })
        .reduce(|| 0.0, f64::max);
    Ok(worst)
}

/// Largest difference quotient over neighbouring grid points along each axis plus
/// `random_pairs` random pairs at several scales. A lower bound on the Lipschitz
/// constant with respect to the max norm.
pub fn measure_lipschitz(net: &Network, grid: &EvalGrid, random_pairs: usize, seed: u64) -> Result<f64> {
    let compiled = CompiledNetwork::from(net);
    net.check_input(grid.t)?;
    let t = grid.t;
    let lattice_side = if grid.stratified.is_some() { 0 } else { grid.side };
    let lattice = if lattice_side > 0 { grid.len() } else { 0 };
    let chunk = 4096;
    let total = lattice + random_pairs;
    let best = (0..total.div_ceil(chunk))
        .into_par_iter()
        .map(|c| {
            let mut scratch = Scratch::default();
            let (mut a, mut b) = (vec![0.0; t], vec![0.0; t]);
            let mut best = 0.0_f64;
            for idx in c * chunk..((c + 1) * chunk).min(total) {
                if idx < lattice {
                    grid.point(idx, &mut a);
                    let fa = compiled.eval_with(&a, &mut scratch).expect("dimension checked")[0];
                    let h = 1.0 / (lattice_side - 1) as f64;
                    for j in 0..t {
                        if a[j] + h > 1.0 + 1e-12 {
                            continue;
                        }
                        b.copy_from_slice(&a);
                        b[j] += h;
                        let fb = compiled.eval_with(&b, &mut scratch).expect("dimension checked")[0];
                        best = best.max((fa - fb).abs() / h);
                    }
                } else {
                    let mut r = rng::lane(seed, idx as u64);
                    let scale = 10f64.powi(-(r.random_range(1..=4)));
                    for j in 0..t {
                        a[j] = r.random::<f64>();
                        b[j] = (a[j] + scale * r.random_range(-1.0..1.0)).clamp(0.0, 1.0);
                    }
                    let dx = a.iter().zip(&b).fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()));
                    if dx == 0.0 {
                        continue;
                    }
                    let fa = compiled.eval_with(&a, &mut scratch).expect("dimension checked")[0];
                    let fb = compiled.eval_with(&b, &mut scratch).expect("dimension checked")[0];
                    best = best.max((fa - fb).abs() / dx);
                }
            }
            best
        })
        .reduce(|| 0.0, f64::max);
    Ok(best)
}

/// Builds the approximant of `f` and measures it.
///
/// The sup error is measured on the `(10M+1)^t` lattice (or its stratified
/// replacement), the Lipschitz constant on lattice neighbours and `10^4` random pairs.
pub fn certify(f: &HolderFunction, n: usize, m: usize, sup_cap: Option<f64>, seed: u64) -> Result<(Network, Certificate)> {
    let plan = ApproxPlan::new(f, n, m)?;
    let net = build_approximator(f, &plan)?;
    let certificate = certify_network(f, &plan, &net, sup_cap, seed)?;
    Ok((net, certificate))
}

pub fn certify_network(
    f: &HolderFunction,
    plan: &ApproxPlan,
    net: &Network,
    sup_cap: Option<f64>,
    seed: u64,
) -> Result<Certificate> {
    let bounds = TheoreticalBounds::new(f, plan, sup_cap);
    let grid = EvalGrid::new(f.t, 10 * plan.grid + 1, seed);
    let measured_sup = measure_sup(net, f, &grid)?;
    let measured_lip = measure_lipschitz(net, &grid, 10_000, seed)?;
    Ok(Certificate {
        function: f.name.clone(),
        n: plan.n,
        m: plan.m,
        sup_bound: bounds.sup,
        measured_sup,
        lip_bound: bounds.lipschitz,
        measured_lip,
        depth: net.depth(),
        depth_bound: bounds.depth,
        sparsity: net.sparsity(),
        sparsity_bound: bounds.sparsity,
        grid_spec: grid.describe(),
    })
}
