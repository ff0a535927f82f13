//! Explicit network approximants of Hölder functions built from local Taylor patches.
//!
//! With grid `D(M) = {0, 1/M, …, 1}^t` the network computes
//!
//! ```text
//! Q1(y)_l = B⁻¹ Σ_{|γ|<β} c_γ(x_l) M_m(y_γ) + 1/2
//! Q2(y)   = Σ_l mult_m(Q1(y)_l, Hat_{x_l}(y))
//! Q3(y)   = B M^t (Q2(y) - 1/(2 M^t))
//! ```
//!
//! and is assembled in three stages: tents and a copy of the input (2 layers), all hat
//! and monomial trees side by side, then one `mult_m` per grid point.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::holder::{multi_indices, HolderFunction};
use super::mult::{ceil_log2, multiprod_net, mult_net};
use crate::network::{self, ops, Architecture, Network};
use crate::{Error, Result};

/// Size parameters of one approximant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ApproxPlan {
    /// Network-size parameter.
    #[serde(rename = "N")]
    pub n: usize,
    /// Multiplication depth parameter.
    pub m: usize,
    /// Grid resolution: the largest integer with `(M+1)^t ≤ N`.
    #[serde(rename = "M")]
    pub grid: usize,
    /// Coefficient scale `⌈2 K e^t⌉`.
    #[serde(rename = "B")]
    pub scale: f64,
}

impl ApproxPlan {
    /// Smallest admissible `N`, `⌈(β+1)^t ∨ (K+1)e^t⌉`.
    pub fn minimal_n(f: &HolderFunction) -> usize {
        let t = f.t as f64;
        (f.beta + 1.0).powf(t).max((f.k + 1.0) * t.exp()).ceil() as usize
    }

    /// Checks `N ≥ (β+1)^t ∨ (K+1)e^t` and derives `M` and `B`.
    pub fn new(f: &HolderFunction, n: usize, m: usize) -> Result<Self> {
        if m < 1 {
            return Err(Error::Precondition(format!("multiplication depth m must be at least 1, got {m}")));
        }
        let t = f.t as f64;
        let need = (f.beta + 1.0).powf(t).max((f.k + 1.0) * t.exp());
        if (n as f64) < need {
            return Err(Error::Precondition(format!(
                "N = {n} is too small: need N ≥ (beta+1)^t ∨ (K+1)e^t = {need:.4} for t = {}, beta = {}, K = {}",
                f.t, f.beta, f.k
            )));
        }
        let mut grid = 1usize;
        while (grid as f64 + 2.0).powi(f.t as i32) <= n as f64 {
            grid += 1;
        }
        let scale = (2.0 * f.k * t.exp()).ceil();
        Ok(ApproxPlan { n, m, grid, scale })
    }

    /// Grid points `x_l`, first coordinate fastest.
    pub fn grid_points(&self, t: usize) -> Vec<Vec<f64>> {
        let side = self.grid + 1;
        (0..side.pow(t as u32))
            .map(|mut idx| {
                (0..t)
                    .map(|_| {
                        let i = idx % side;
                        idx /= side;
                        i as f64 / self.grid as f64
                    })
                    .collect()
            })
            .collect()
    }
}

/// Bounds guaranteed for the approximant of `f` under `plan`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoreticalBounds {
    /// `(2K+1)(1+t²+β²)6^t N 2^{-m} + K 3^β N^{-β/t}`.
    pub sup: f64,
    /// `2βF(K+1)e^t(24 t⁶ 2^t N 2^{-m} + 3t)`.
    pub lipschitz: f64,
    /// `8 + (m+5)(1 + ⌈log₂(t ∨ β)⌉)`.
    pub depth: usize,
    /// `141 (t+β+1)^{3+t} N (m+6)`.
    pub sparsity: f64,
}

impl TheoreticalBounds {
    /// `sup_cap` is the class bound F; when `None`, `F = K`.
    pub fn new(f: &HolderFunction, plan: &ApproxPlan, sup_cap: Option<f64>) -> Self {
        let (t, beta, k) = (f.t as f64, f.beta, f.k);
        let n = plan.n as f64;
        let pm = 2f64.powi(-(plan.m as i32));
        let cap = sup_cap.unwrap_or(k);
        let sup = (2.0 * k + 1.0) * (1.0 + t * t + beta * beta) * 6f64.powf(t) * n * pm
            + k * 3f64.powf(beta) * n.powf(-beta / t);
        let lipschitz = 2.0 * beta * cap * (k + 1.0) * t.exp() * (24.0 * t.powi(6) * 2f64.powf(t) * n * pm + 3.0 * t);
        let log_term = (t.max(beta)).log2().ceil() as usize;
        let depth = 8 + (plan.m + 5) * (1 + log_term);
        let sparsity = 141.0 * (t + beta + 1.0).powf(3.0 + t) * n * (plan.m as f64 + 6.0);
        TheoreticalBounds { sup, lipschitz, depth, sparsity }
    }
}

/// Limit on dense parameter storage; constructions beyond it are refused rather than
/// exhausting memory.
const MAX_DENSE_PARAMETERS: usize = 60_000_000;

/// Builds the approximant network of `f`.
pub fn build_approximator(f: &HolderFunction, plan: &ApproxPlan) -> Result<Network> {
    let t = f.t;
    let grid = plan.grid;
    let m = plan.m;
    let points = plan.grid_points(t);
    let n_points = points.len();
    let gammas: Vec<Vec<usize>> = multi_indices(t, f.max_degree()).into_iter().skip(1).collect();

    let est_width = 8 * n_points * t.max(2) + 8 * gammas.len() * f.max_degree().max(1);
    if est_width.saturating_mul(est_width) > MAX_DENSE_PARAMETERS {
        return Err(Error::Precondition(format!(
            "approximant with {n_points} grid points is too large for dense storage; reduce N"
        )));
    }

    // stage A: tents I_{i/M}(y_j) for i = 0..=M, j = 0..t, then a copy of y
    let stage_a = tents_and_copy(t, grid)?;
    let tent_index = |i: usize, j: usize| j * (grid + 1) + i;
    let copy_index = |j: usize| t * (grid + 1) + j;
    let a_out = t * (grid + 2);

    // stage B: one hat tree per grid point, one monomial tree per γ
    let side = grid + 1;
    let mut branches = Vec::with_capacity(n_points + gammas.len());
    let hat_tree = multiprod_net(m, t)?;
    for l in 0..n_points {
        let mut idx = l;
        let mut sel = DMatrix::zeros(t, a_out);
        for j in 0..t {
            sel[(j, tent_index(idx % side, j))] = 1.0;
            idx /= side;
        }
        branches.push((hat_tree.clone(), sel));
    }
    for gamma in &gammas {
        let degree: usize = gamma.iter().sum();
        let mut sel = DMatrix::zeros(degree, a_out);
        let mut row = 0;
        for (j, &g) in gamma.iter().enumerate() {
            for _ in 0..g {
                sel[(row, copy_index(j))] = 1.0;
                row += 1;
            }
        }
        branches.push((multiprod_net(m, degree)?, sel));
    }
    let depth_b = branches.iter().map(|(n, _)| n.depth()).max().unwrap_or(0);
    let stage_b: Result<Vec<Network>> = branches
        .iter()
        .map(|(net, sel)| ops::with_input_map(&network::deepen(net, depth_b)?, sel))
        .collect();
    let stage_b = network::parallel(&stage_b?)?;
    let b_out = n_points + gammas.len();

    // stage C: mult_m(Q1_l, Hat_l) for each grid point plus a constant-one unit
    let mult = mult_net(m)?;
    let mut products = Vec::with_capacity(n_points + 1);
    for (l, x) in points.iter().enumerate() {
        let coeffs = f.taylor_coefficients(x);
        let mut a = DMatrix::zeros(2, b_out);
        for (g, c) in coeffs.iter().skip(1).enumerate() {
            a[(0, n_points + g)] = c / plan.scale;
        }
        a[(1, l)] = 1.0;
        let mut c = DVector::zeros(2);
        c[0] = coeffs[0] / plan.scale + 0.5;
        products.push(ops::with_input_affine(&mult, &a, &c)?);
    }
    products.push(network::deepen(&ops::constant(b_out, 1.0), mult.depth())?);
    let stage_c = network::parallel(&products)?;

    let mt = (grid as f64).powi(t as i32);
    let mut s = DMatrix::from_element(1, n_points + 1, plan.scale * mt);
    s[(0, n_points)] = -plan.scale / 2.0;
    let stage_c = ops::with_output_map(&stage_c, &s)?;

    let ab = network::fuse(&stage_b, &stage_a)?;
    network::fuse(&stage_c, &ab)
}

fn tents_and_copy(t: usize, grid: usize) -> Result<Network> {
    let side = grid + 1;
    let h1 = 2 * t * side + t;
    let h2 = t * side + t;
    let mut w0 = DMatrix::zeros(h1, t);
    let mut v0 = DVector::zeros(h1);
    let mut w1 = DMatrix::zeros(h2, h1);
    let mut v1 = DVector::zeros(h2);
    let inv = 1.0 / grid as f64;
    for j in 0..t {
        for i in 0..side {
            let c = i as f64 * inv;
            let u = j * side + i;
            w0[(2 * u, j)] = 1.0;
            v0[2 * u] = c;
            w0[(2 * u + 1, j)] = -1.0;
            v0[2 * u + 1] = -c;
            w1[(u, 2 * u)] = -1.0;
            w1[(u, 2 * u + 1)] = -1.0;
            v1[u] = -inv;
        }
        let copy = 2 * t * side + j;
        w0[(copy, j)] = 1.0;
        w1[(t * side + j, copy)] = 1.0;
    }
    Network::new(
        Architecture::new(vec![t, h1, h2, h2])?,
        vec![w0, w1, DMatrix::identity(h2, h2)],
        vec![v0, v1],
    )
}

/// Depth of the approximant: `2 + (⌈log₂(t ∨ deg)⌉ + 1)(m + 2)` with `deg` the largest
/// monomial degree.
pub fn approximator_depth(f: &HolderFunction, m: usize) -> usize {
    2 + (ceil_log2(f.t.max(f.max_degree())) + 1) * (m + 2)
}

#[cfg(test)]
mod tests {
    use super::super::holder::catalog;
    use super::*;
    use crate::network::CompiledNetwork;

    /// Independent evaluation of Q3 from the defining formulas.
    fn q3_formula(f: &HolderFunction, plan: &ApproxPlan, y: &[f64]) -> f64 {
        fn r(mut s: f64, k: usize) -> f64 {
            for j in 1..=k {
                s = f64::min(s / 2.0, 2f64.powi(1 - 2 * j as i32) - s / 2.0);
            }
            s
        }
        let mult = |x: f64, z: f64| {
            let mut total = (x + z) / 2.0 - 0.25;
            for k in 1..=plan.m + 1 {
                total += r((x - z + 1.0) / 2.0, k) - r((x + z) / 2.0, k);
            }
            total.max(0.0)
        };
        let prod = |v: Vec<f64>| {
            if v.len() == 1 {
                return v[0];
            }
            let mut level = v;
            level.resize(level.len().next_power_of_two(), 1.0);
            while level.len() > 1 {
                level = level.chunks(2).map(|p| mult(p[0], p[1])).collect();
            }
            level[0]
        };
        let gm = plan.grid as f64;
        let gammas = multi_indices(f.t, f.max_degree());
        let mut q2 = 0.0;
        for x in plan.grid_points(f.t) {
            let c = f.taylor_coefficients(&x);
            let mut q1 = c[0];
            for (g, cg) in gammas.iter().zip(&c).skip(1) {
                let factors: Vec<f64> = g.iter().enumerate().flat_map(|(j, &e)| std::iter::repeat_n(y[j], e)).collect();
                q1 += cg * prod(factors);
            }
            q1 = q1 / plan.scale + 0.5;
            let tents: Vec<f64> = (0..f.t).map(|j| (1.0 / gm - (y[j] - x[j]).abs()).max(0.0)).collect();
            q2 += mult(q1, prod(tents));
        }
        plan.scale * gm.powi(f.t as i32) * (q2 - 1.0 / (2.0 * gm.powi(f.t as i32)))
    }

    #[test]
    fn plan_grid_and_scale() {
        let f = catalog::product2().unwrap();
        let plan = ApproxPlan::new(&f, 45, 8).unwrap();
        assert_eq!(plan.grid, 5);
        assert_eq!(plan.scale, (10.0 * 2f64.exp()).ceil());
        let err = ApproxPlan::new(&f, 44, 8).unwrap_err().to_string();
        assert!(err.contains("(beta+1)^t ∨ (K+1)e^t"), "{err}");
        let lin = catalog::linear().unwrap();
        assert_eq!(ApproxPlan::new(&lin, 9, 8).unwrap().grid, 8);
    }

    #[test]
    fn network_equals_formula() {
        for (name, n) in [("linear", 9), ("product2", 45), ("sin2", 23)] {
            let f = catalog::by_name(name).unwrap();
            let plan = ApproxPlan::new(&f, n, 8).unwrap();
            let net = build_approximator(&f, &plan).unwrap();
            assert_eq!(net.depth(), approximator_depth(&f, plan.m));
            let fast = CompiledNetwork::from(&net);
            for i in 0..=12 {
                for j in 0..=if f.t == 2 { 12 } else { 0 } {
                    let y: Vec<f64> = [i as f64 / 12.0, j as f64 / 12.0][..f.t].to_vec();
                    let got = fast.eval(&y).unwrap()[0];
                    let want = q3_formula(&f, &plan, &y);
                    assert!((got - want).abs() <= 1e-9 * (1.0 + want.abs()), "{name} {y:?}: {got} vs {want}");
                }
            }
        }
    }

    #[test]
    fn structural_budgets_hold() {
        for (name, n, m) in [("zero", 15, 8), ("linear", 9, 12), ("product2", 45, 12), ("sin2", 30, 8)] {
            let f = catalog::by_name(name).unwrap();
            let plan = ApproxPlan::new(&f, n, m).unwrap();
            let net = build_approximator(&f, &plan).unwrap();
            let b = TheoreticalBounds::new(&f, &plan, None);
            assert!(net.depth() <= b.depth, "{name}");
            assert!((net.sparsity() as f64) <= b.sparsity, "{name}");
        }
    }

    #[test]
    fn zero_function_is_reproduced() {
        let f = catalog::zero(2).unwrap();
        let plan = ApproxPlan::new(&f, 15, 8).unwrap();
        let net = build_approximator(&f, &plan).unwrap();
        for y in [[0.0, 0.0], [0.3, 0.9], [1.0, 1.0]] {
            let v = net.eval(&y).unwrap()[0];
            assert!(v.abs() <= TheoreticalBounds::new(&f, &plan, None).sup);
        }
    }
}
