//! Network combinators used to assemble larger constructions from small ones.

use nalgebra::{DMatrix, DVector};

use super::{Architecture, Network};
use crate::{Error, Result};

/// `f ∘ g`, exact for every input.
///
/// The last linear map of `g` is routed through one extra hidden layer holding
/// `(σ(W x), σ(-W x))`, and `f` reads it back as `W_f0 (a - b)`. This costs one layer and
/// `nnz(W_g,last) + nnz(W_f,0)` extra nonzeros but needs no range assumption.
pub fn compose(f: &Network, g: &Network) -> Result<Network> {
    if f.input_dim() != g.output_dim() {
        return Err(Error::dim("compose: input of outer network", f.input_dim(), g.output_dim()));
    }
    let lg = g.depth();
    let lf = f.depth();
    let wg = &g.weights()[lg];
    let wf = &f.weights()[0];
    let m = wg.nrows();

    let mut split = DMatrix::zeros(2 * m, wg.ncols());
    split.view_mut((0, 0), (m, wg.ncols())).copy_from(wg);
    split.view_mut((m, 0), (m, wg.ncols())).copy_from(&(-wg));
    let mut merge = DMatrix::zeros(wf.nrows(), 2 * m);
    merge.view_mut((0, 0), (wf.nrows(), m)).copy_from(wf);
    merge.view_mut((0, m), (wf.nrows(), m)).copy_from(&(-wf));

    let mut weights = g.weights()[..lg].to_vec();
    weights.push(split);
    weights.push(merge);
    weights.extend_from_slice(&f.weights()[1..]);
    let mut biases = g.biases().to_vec();
    biases.push(DVector::zeros(2 * m));
    biases.extend_from_slice(f.biases());

    let mut widths = g.arch().widths[..=lg].to_vec();
    widths.push(2 * m);
    widths.extend_from_slice(&f.arch().widths[1..]);
    let mut arch = Architecture::new(widths)?;
    arch.bottleneck = g.arch().bottleneck.or(f.arch().bottleneck.map(|b| b + lg + 1));
    debug_assert_eq!(arch.depth, lf + lg + 1);
    Network::new(arch, weights, biases)
}

/// `outer ∘ inner` with the last linear map of `inner` multiplied into the first of
/// `outer`. Depth is `L_outer + L_inner`; exact for every input.
pub fn fuse(outer: &Network, inner: &Network) -> Result<Network> {
    if outer.input_dim() != inner.output_dim() {
        return Err(Error::dim("fuse: input of outer network", outer.input_dim(), inner.output_dim()));
    }
    let li = inner.depth();
    let merged = &outer.weights()[0] * &inner.weights()[li];
    let mut weights = inner.weights()[..li].to_vec();
    weights.push(merged);
    weights.extend_from_slice(&outer.weights()[1..]);
    let mut biases = inner.biases().to_vec();
    biases.extend_from_slice(outer.biases());
    let mut widths = inner.arch().widths[..=li].to_vec();
    widths.extend_from_slice(&outer.arch().widths[1..]);
    let mut arch = Architecture::new(widths)?;
    arch.bottleneck = inner.arch().bottleneck.or(outer.arch().bottleneck.map(|b| b + li));
    Network::new(arch, weights, biases)
}

/// Stacks networks that read the same input and have the same depth.
pub fn parallel(nets: &[Network]) -> Result<Network> {
    let first = nets
        .first()
        .ok_or_else(|| Error::Architecture("parallel needs at least one network".into()))?;
    let (d, l) = (first.input_dim(), first.depth());
    for (k, n) in nets.iter().enumerate() {
        if n.input_dim() != d {
            return Err(Error::dim(format!("parallel: input of network {k}"), d, n.input_dim()));
        }
        if n.depth() != l {
            return Err(Error::Architecture(format!(
                "parallel: network {k} has depth {}, expected {l} (deepen first)",
                n.depth()
            )));
        }
    }
    let mut widths = vec![d];
    for i in 1..=l + 1 {
        widths.push(nets.iter().map(|n| n.arch().widths[i]).sum());
    }
    let mut weights = Vec::with_capacity(l + 1);
    let mut row = 0;
    let mut w0 = DMatrix::zeros(widths[1], d);
    for n in nets {
        let w = &n.weights()[0];
        w0.view_mut((row, 0), w.shape()).copy_from(w);
        row += w.nrows();
    }
    weights.push(w0);
    for i in 1..=l {
        weights.push(block_diag(nets.iter().map(|n| &n.weights()[i])));
    }
    let biases = (0..l)
        .map(|i| {
            let parts: Vec<f64> = nets.iter().flat_map(|n| n.biases()[i].iter().copied()).collect();
            DVector::from_vec(parts)
        })
        .collect();
    Network::new(Architecture::new(widths)?, weights, biases)
}

/// Pads `net` to depth `target` by prepending ReLU pass-through layers at the input.
/// Exact on nonnegative inputs.
pub fn deepen(net: &Network, target: usize) -> Result<Network> {
    let l = net.depth();
    if target < l {
        return Err(Error::Architecture(format!("deepen: target depth {target} below current depth {l}")));
    }
    let extra = target - l;
    if extra == 0 {
        return Ok(net.clone());
    }
    let d = net.input_dim();
    let mut weights = vec![DMatrix::identity(d, d); extra];
    weights.extend_from_slice(net.weights());
    let mut biases = vec![DVector::zeros(d); extra];
    biases.extend_from_slice(net.biases());
    let mut widths = vec![d; extra];
    widths.extend_from_slice(&net.arch().widths);
    let mut arch = Architecture::new(widths)?;
    arch.bottleneck = net.arch().bottleneck.map(|b| b + extra);
    Network::new(arch, weights, biases)
}

/// `x ↦ net(A x + c)`. The constant is folded into the first hidden shift, so `net`
/// needs at least one hidden layer unless `c` is zero.
pub(crate) fn with_input_affine(net: &Network, a: &DMatrix<f64>, c: &DVector<f64>) -> Result<Network> {
    if a.nrows() != net.input_dim() || c.len() != net.input_dim() {
        return Err(Error::dim("input affine map rows", net.input_dim(), a.nrows()));
    }
    let (mut arch, mut weights, mut biases) = net.clone().into_parts();
    if arch.depth == 0 && c.iter().any(|v| *v != 0.0) {
        return Err(Error::Architecture("cannot fold an input offset into a network without hidden layers".into()));
    }
    let shift = &weights[0] * c;
    weights[0] = &weights[0] * a;
    if arch.depth > 0 {
        biases[0] -= shift;
    }
    arch.widths[0] = a.ncols();
    Network::new(arch, weights, biases)
}

/// `x ↦ net(A x)`.
pub(crate) fn with_input_map(net: &Network, a: &DMatrix<f64>) -> Result<Network> {
    with_input_affine(net, a, &DVector::zeros(a.nrows()))
}

/// `x ↦ B net(x)`.
pub(crate) fn with_output_map(net: &Network, b: &DMatrix<f64>) -> Result<Network> {
    if b.ncols() != net.output_dim() {
        return Err(Error::dim("output map columns", net.output_dim(), b.ncols()));
    }
    let (mut arch, mut weights, biases) = net.clone().into_parts();
    let l = arch.depth;
    weights[l] = b * &weights[l];
    arch.widths[l + 1] = b.nrows();
    Network::new(arch, weights, biases)
}

/// Constant map `R^d → R`, `x ↦ value`, through one hidden unit `σ(0·x + 1)`.
pub(crate) fn constant(d: usize, value: f64) -> Network {
    let arch = Architecture::new(vec![d, 1, 1]).expect("constant architecture");
    Network::new(
        arch,
        vec![DMatrix::zeros(1, d), DMatrix::from_element(1, 1, value)],
        vec![DVector::from_element(1, -1.0)],
    )
    .expect("constant shapes")
}

fn block_diag<'a>(blocks: impl Iterator<Item = &'a DMatrix<f64>> + Clone) -> DMatrix<f64> {
    let rows = blocks.clone().map(|b| b.nrows()).sum();
    let cols = blocks.clone().map(|b| b.ncols()).sum();
    let mut out = DMatrix::zeros(rows, cols);
    let (mut r, mut c) = (0, 0);
    for b in blocks {
        out.view_mut((r, c), b.shape()).copy_from(b);
        r += b.nrows();
        c += b.ncols();
    }
    out
}
