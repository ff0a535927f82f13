//! Read-only compressed form of a network for fast repeated evaluation.
//!
//! The explicit approximator constructions are very sparse (a few nonzeros per row
//! out of thousands of columns), so dense products would dominate grid verification.

use super::Network;
use crate::{Error, Result};

#[derive(Debug, Clone)]
struct CsrLayer {
    rows: usize,
    row_start: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
    shift: Option<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub struct CompiledNetwork {
    input_dim: usize,
    layers: Vec<CsrLayer>,
    max_width: usize,
}

impl From<&Network> for CompiledNetwork {
    fn from(net: &Network) -> Self {
        let layers = net
            .weights()
            .iter()
            .enumerate()
            .map(|(i, w)| {
                let mut row_start = vec![0];
                let (mut cols, mut vals) = (Vec::new(), Vec::new());
                for r in 0..w.nrows() {
                    for c in 0..w.ncols() {
                        let v = w[(r, c)];
                        if v != 0.0 {
                            cols.push(c);
                            vals.push(v);
                        }
                    }
                    row_start.push(cols.len());
                }
                CsrLayer {
                    rows: w.nrows(),
                    row_start,
                    cols,
                    vals,
                    shift: net.biases().get(i).map(|b| b.as_slice().to_vec()),
                }
            })
            .collect();
        CompiledNetwork {
            input_dim: net.input_dim(),
            layers,
            max_width: net.arch().widths.iter().copied().max().unwrap_or(0),
        }
    }
}

/// Reusable buffers for [`CompiledNetwork::eval_with`].
#[derive(Debug, Clone, Default)]
pub struct Scratch {
    a: Vec<f64>,
    b: Vec<f64>,
}

impl CompiledNetwork {
    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().map_or(0, |l| l.rows)
    }

    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut scratch = Scratch::default();
        Ok(self.eval_with(x, &mut scratch)?.to_vec())
    }

    /// Evaluates into `scratch`, returning a view of the output.
    pub fn eval_with<'s>(&self, x: &[f64], scratch: &'s mut Scratch) -> Result<&'s [f64]> {
        if x.len() != self.input_dim {
            return Err(Error::dim("input to layer 0 (weights[0])", self.input_dim, x.len()));
        }
        scratch.a.clear();
        scratch.a.extend_from_slice(x);
        scratch.b.resize(self.max_width, 0.0);
        for layer in &self.layers {
            let out = &mut scratch.b[..layer.rows];
            for (r, o) in out.iter_mut().enumerate() {
                let mut acc = 0.0;
                for k in layer.row_start[r]..layer.row_start[r + 1] {
                    acc += layer.vals[k] * scratch.a[layer.cols[k]];
                }
                *o = match &layer.shift {
                    Some(v) => (acc - v[r]).max(0.0),
                    None => acc,
                };
            }
            std::mem::swap(&mut scratch.a, &mut scratch.b);
            scratch.a.truncate(layer.rows);
            scratch.b.resize(self.max_width, 0.0);
        }
        Ok(&scratch.a[..])
    }
}
