//! ReLU realisations of approximate multiplication.
//!
//! `mult_m(x, y) = (Σ_{k=1}^{m+1} {R^k((x-y+1)/2) - R^k((x+y)/2)} + (x+y)/2 - 1/4)_+`
//! with `R^k = T^k ∘ … ∘ T^1` and `T^k(r) = min{r/2, 2^{1-2k} - r/2}`.
//!
//! Each `T^k` is evaluated by the three units `σ(r), σ(-r), σ(r - 2^{1-2k})` through
//! `T^k(r) = (σ(r) - σ(-r))/2 - σ(r - 2^{1-2k})`, which holds for every real `r`, so the
//! networks below reproduce the formulas on all of `R^2`, not just the unit square.

use nalgebra::{DMatrix, DVector};

use crate::network::{self, ops, Architecture, Network};
use crate::{Error, Result};

fn shift(k: usize) -> f64 {
    2f64.powi(1 - 2 * k as i32)
}

/// Per-layer unit layout: `[w+, w-, wc, u+, u-, uc, z+, z-]`.
const WIDTH: usize = 8;

/// Coefficients of `T^k(r)` on the three units of a track.
const TRACK_OUT: [f64; 3] = [0.5, -0.5, -1.0];

pub fn mult_net(m: usize) -> Result<Network> {
    if m < 1 {
        return Err(Error::Precondition(format!("multiplication depth m must be at least 1, got {m}")));
    }
    let layers = m + 1;
    let mut weights = Vec::with_capacity(m + 3);
    let mut biases = Vec::with_capacity(m + 2);

    // first layer reads (x, y): r_w = (x - y + 1)/2, r_u = (x + y)/2, Z = r_u
    let mut w0 = DMatrix::zeros(WIDTH, 2);
    let mut v0 = DVector::zeros(WIDTH);
    let rows: [([f64; 2], f64); WIDTH] = [
        ([0.5, -0.5], -0.5),
        ([-0.5, 0.5], 0.5),
        ([0.5, -0.5], shift(1) - 0.5),
        ([0.5, 0.5], 0.0),
        ([-0.5, -0.5], 0.0),
        ([0.5, 0.5], shift(1)),
        ([0.5, 0.5], 0.0),
        ([-0.5, -0.5], 0.0),
    ];
    for (r, (w, v)) in rows.iter().enumerate() {
        w0[(r, 0)] = w[0];
        w0[(r, 1)] = w[1];
        v0[r] = *v;
    }
    weights.push(w0);
    biases.push(v0);

    // carry row: Z' = Z + T(r_w) - T(r_u)
    let mut carry = [0.0; WIDTH];
    for j in 0..3 {
        carry[j] = TRACK_OUT[j];
        carry[3 + j] = -TRACK_OUT[j];
    }
    carry[6] = 1.0;
    carry[7] = -1.0;

    for k in 2..=layers {
        let mut w = DMatrix::zeros(WIDTH, WIDTH);
        let mut v = DVector::zeros(WIDTH);
        for track in 0..2 {
            let base = 3 * track;
            for j in 0..3 {
                w[(base, base + j)] = TRACK_OUT[j];
                w[(base + 1, base + j)] = -TRACK_OUT[j];
                w[(base + 2, base + j)] = TRACK_OUT[j];
            }
            v[base + 2] = shift(k);
        }
        for c in 0..WIDTH {
            w[(6, c)] = carry[c];
            w[(7, c)] = -carry[c];
        }
        weights.push(w);
        biases.push(v);
    }

    let last = DMatrix::from_row_slice(1, WIDTH, &carry);
    weights.push(last);
    biases.push(DVector::from_element(1, 0.25));
    weights.push(DMatrix::from_element(1, 1, 1.0));

    let mut widths = vec![2];
    widths.extend(std::iter::repeat_n(WIDTH, layers));
    widths.extend([1, 1]);
    Network::new(Architecture::new(widths)?, weights, biases)
}

/// Network for `M_m(y_1, …, y_t)`: a binary tree of `mult_m` nets over the inputs padded
/// with ones to `2^⌈log₂ t⌉` leaves. Depth `⌈log₂ t⌉ (m + 2)`.
pub fn multiprod_net(m: usize, t: usize) -> Result<Network> {
    if t < 1 {
        return Err(Error::Precondition("product needs at least one factor".into()));
    }
    if t == 1 {
        return Ok(Network::identity(1));
    }
    let mult = mult_net(m)?;
    let q = ceil_log2(t);
    let leaves = 1usize << q;
    let mut tree: Option<Network> = None;
    let mut width = leaves;
    while width > 1 {
        let pairs: Result<Vec<Network>> = (0..width / 2)
            .map(|i| {
                let mut sel = DMatrix::zeros(2, width);
                sel[(0, 2 * i)] = 1.0;
                sel[(1, 2 * i + 1)] = 1.0;
                ops::with_input_map(&mult, &sel)
            })
            .collect();
        let level = network::parallel(&pairs?)?;
        tree = Some(match tree {
            None => level,
            Some(inner) => network::fuse(&level, &inner)?,
        });
        width /= 2;
    }
    let tree = tree.expect("t >= 2 gives at least one level");
    let pad = DMatrix::from_fn(leaves, t, |r, c| if r == c { 1.0 } else { 0.0 });
    let ones = DVector::from_fn(leaves, |r, _| if r >= t { 1.0 } else { 0.0 });
    ops::with_input_affine(&tree, &pad, &ones)
}

/// Network for `Hat_c(y) = M_m(I_{c_1}(y_1), …, I_{c_t}(y_t))`, `I_c(s) = (1/M - |s - c|)_+`.
pub fn hat_net(center: &[f64], grid: usize, m: usize) -> Result<Network> {
    let t = center.len();
    if grid == 0 {
        return Err(Error::Precondition("grid resolution M must be positive".into()));
    }
    for (j, c) in center.iter().enumerate() {
        let scaled = c * grid as f64;
        if !(0.0..=1.0).contains(c) || (scaled - scaled.round()).abs() > 1e-9 {
            return Err(Error::Precondition(format!(
                "center coordinate {j} = {c} is not on the grid {{0, 1/{grid}, …, 1}}"
            )));
        }
    }
    let tents = tent_layer(t, grid, |j| center[j])?;
    network::fuse(&multiprod_net(m, t)?, &tents)
}

/// Two-layer net computing `I_{c(j)}(y_j)` for each coordinate `j`.
fn tent_layer(t: usize, grid: usize, center: impl Fn(usize) -> f64) -> Result<Network> {
    let mut w0 = DMatrix::zeros(2 * t, t);
    let mut v0 = DVector::zeros(2 * t);
    let mut w1 = DMatrix::zeros(t, 2 * t);
    for j in 0..t {
        let c = center(j);
        w0[(2 * j, j)] = 1.0;
        v0[2 * j] = c;
        w0[(2 * j + 1, j)] = -1.0;
        v0[2 * j + 1] = -c;
        w1[(j, 2 * j)] = -1.0;
        w1[(j, 2 * j + 1)] = -1.0;
    }
    let v1 = DVector::from_element(t, -1.0 / grid as f64);
    Network::new(
        Architecture::new(vec![t, 2 * t, t, t])?,
        vec![w0, w1, DMatrix::identity(t, t)],
        vec![v0, v1],
    )
}

pub(crate) fn ceil_log2(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}
