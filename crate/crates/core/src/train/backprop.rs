use nalgebra::{DMatrix, DVector};

use super::WeightFn;
use crate::network::Network;
use crate::simulate::LagDataset;
use crate::{Error, Result};

/// Derivatives with respect to every weight and bias, shaped like the network.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradient {
    pub weights: Vec<DMatrix<f64>>,
    pub biases: Vec<DVector<f64>>,
}

impl Gradient {
    pub fn max_abs(&self) -> f64 {
        self.weights.iter().map(|m| m.amax()).chain(self.biases.iter().map(|b| b.amax())).fold(0.0, f64::max)
    }
}

/// Batch loss `(1/|B|) Σ_{i∈B} (1/d)|X_i - f(𝕏_{i-1})|² W(𝕏_{i-1}) + λ‖θ‖²`.
///
/// Over the whole dataset the data term equals the empirical risk times `n/(n-r)`.
pub fn batch_loss(net: &Network, data: &LagDataset, batch: &[usize], w: &WeightFn, l2_lambda: f64) -> Result<f64> {
    let (x, t, wts) = gather(net, data, batch, w)?;
    let fwd = forward(net, &x);
    let y = fwd.output();
    let mut total = 0.0;
    for b in 0..batch.len() {
        let sq: f64 = (0..t.nrows()).map(|j| (y[(j, b)] - t[(j, b)]).powi(2)).sum();
        total += sq * wts[b];
    }
    Ok(total / (batch.len() * t.nrows()) as f64 + l2_lambda * squared_norm(net))
}

/// Exact gradient of [`batch_loss`]; at ReLU kinks the derivative is taken as 0.
pub fn gradient(net: &Network, data: &LagDataset, batch: &[usize], w: &WeightFn, l2_lambda: f64) -> Result<Gradient> {
    let (x, t, wts) = gather(net, data, batch, w)?;
    let fwd = forward(net, &x);
    let l = net.depth();
    let scale = 2.0 / (batch.len() * t.nrows()) as f64;
    let mut delta = fwd.output() - &t;
    for (b, mut col) in delta.column_iter_mut().enumerate() {
        col *= scale * wts[b];
    }
    let mut gw = vec![DMatrix::zeros(0, 0); l + 1];
    let mut gb = vec![DVector::zeros(0); l];
    for i in (0..=l).rev() {
        gw[i] = &delta * fwd.activations[i].transpose();
        if i == 0 {
            break;
        }
        let mut back = net.weights()[i].transpose() * &delta;
        // activations[i] > 0 exactly where the pre-activation exceeded its shift
        back.zip_apply(&fwd.activations[i], |g, a| {
            if a <= 0.0 {
                *g = 0.0;
            }
        });
        gb[i - 1] = -back.column_sum();
        delta = back;
    }
    if l2_lambda != 0.0 {
        for (g, p) in gw.iter_mut().zip(net.weights()) {
            *g += 2.0 * l2_lambda * p;
        }
        for (g, p) in gb.iter_mut().zip(net.biases()) {
            *g += 2.0 * l2_lambda * p;
        }
    }
    Ok(Gradient { weights: gw, biases: gb })
}

pub(crate) fn squared_norm(net: &Network) -> f64 {
    net.weights().iter().map(|m| m.norm_squared()).sum::<f64>() + net.biases().iter().map(|b| b.norm_squared()).sum::<f64>()
}

struct Forward {
    /// `activations[0]` is the input batch, `activations[i]` hidden layer `i`, and the
    /// last entry the linear output.
    activations: Vec<DMatrix<f64>>,
}

impl Forward {
    fn output(&self) -> &DMatrix<f64> {
        self.activations.last().expect("nonempty")
    }
}

fn forward(net: &Network, x: &DMatrix<f64>) -> Forward {
    let l = net.depth();
    let mut activations = Vec::with_capacity(l + 2);
    activations.push(x.clone());
    for i in 0..l {
        let mut z = &net.weights()[i] * &activations[i];
        let v = &net.biases()[i];
        for mut col in z.column_iter_mut() {
            for (zj, vj) in col.iter_mut().zip(v.iter()) {
                *zj = (*zj - vj).max(0.0);
            }
        }
        activations.push(z);
    }
    let y = &net.weights()[l] * &activations[l];
    activations.push(y);
    Forward { activations }
}

fn gather(net: &Network, data: &LagDataset, batch: &[usize], w: &WeightFn) -> Result<(DMatrix<f64>, DMatrix<f64>, Vec<f64>)> {
    if batch.is_empty() {
        return Err(Error::Precondition("batch is empty".into()));
    }
    if net.input_dim() != data.input_dim() {
        return Err(Error::dim("network input (r·d)", data.input_dim(), net.input_dim()));
    }
    if net.output_dim() != data.d() {
        return Err(Error::dim("network output (d)", data.d(), net.output_dim()));
    }
    if let Some(&bad) = batch.iter().find(|&&i| i >= data.len()) {
        return Err(Error::Precondition(format!("batch index {bad} out of range for {} pairs", data.len())));
    }
    let x = DMatrix::from_fn(data.input_dim(), batch.len(), |j, b| data.input(batch[b])[j]);
    let t = DMatrix::from_fn(data.d(), batch.len(), |j, b| data.target(batch[b])[j]);
    let wts = batch.iter().map(|&i| w.eval(data.input(i))).collect();
    Ok((x, t, wts))
}
