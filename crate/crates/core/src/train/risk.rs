use super::WeightFn;
use crate::network::{CompiledNetwork, Network, Scratch};
use crate::simulate::LagDataset;
use crate::{Error, Result};

fn check(net: &Network, data: &LagDataset) -> Result<()> {
    if data.is_empty() {
        return Err(Error::Precondition("dataset is empty".into()));
    }
    if net.input_dim() != data.input_dim() {
        return Err(Error::dim("network input (r·d)", data.input_dim(), net.input_dim()));
    }
    if net.output_dim() != data.d() {
        return Err(Error::dim("network output (d)", data.d(), net.output_dim()));
    }
    Ok(())
}

fn weighted_sq(pred: &[f64], target: &[f64], weight: f64) -> f64 {
    let sq: f64 = pred.iter().zip(target).map(|(p, t)| (p - t) * (p - t)).sum();
    sq / target.len() as f64 * weight
}

/// `R̂_n(f) = (1/n) Σ_{i=r+1}^{n} (1/d) |X_i - f(𝕏_{i-1})|² W(𝕏_{i-1})`, `n` the length
/// of the underlying series (the sum has `n - r` terms).
pub fn empirical_risk(net: &Network, data: &LagDataset, w: &WeightFn) -> Result<f64> {
    check(net, data)?;
    let compiled = CompiledNetwork::from(net);
    let mut scratch = Scratch::default();
    let mut total = 0.0;
    for i in 0..data.len() {
        let x = data.input(i);
        let pred = compiled.eval_with(x, &mut scratch)?;
        total += weighted_sq(pred, data.target(i), w.eval(x));
    }
    Ok(total / data.series_len() as f64)
}

/// Risk of the naive forecast `f(𝕏_{i-1}) = X_{i-1}` under the same formula.
pub fn naive_predict(data: &LagDataset, w: &WeightFn) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::Precondition("dataset is empty".into()));
    }
    let d = data.d();
    let total: f64 = (0..data.len())
        .map(|i| {
            let x = data.input(i);
            weighted_sq(&x[..d], data.target(i), w.eval(x))
        })
        .sum();
    Ok(total / data.series_len() as f64)
}

/// Iterates the one-step predictor `k` times from the lag state `x0`, each forecast
/// becoming the newest lag of the next state.
pub fn multi_step_forecast(net: &Network, x0: &[f64], k: usize) -> Result<Vec<Vec<f64>>> {
    net.check_input(x0.len())?;
    let d = net.output_dim();
    if !x0.len().is_multiple_of(d) {
        return Err(Error::Precondition(format!("lag state of length {} is not a multiple of d = {d}", x0.len())));
    }
    let mut state = x0.to_vec();
    let mut out = Vec::with_capacity(k);
    for _ in 0..k {
        let y = net.eval(&state)?;
        let len = state.len();
        state.copy_within(0..len - d, d);
        state[..d].copy_from_slice(y.as_slice());
        out.push(y.as_slice().to_vec());
    }
    Ok(out)
}

/// Mean `(1/d)|X_{i+j-1} - forecast_j|²` for `j = 1..k` over every start with `k`
/// observed successors.
pub fn forecast_errors(net: &Network, data: &LagDataset, k: usize) -> Result<Vec<f64>> {
    check(net, data)?;
    if k == 0 || data.len() < k {
        return Err(Error::Precondition(format!("need k ≥ 1 and at least k pairs, got k = {k}, {} pairs", data.len())));
    }
    let starts = data.len() + 1 - k;
    let mut sums = vec![0.0; k];
    for i in 0..starts {
        for (j, f) in multi_step_forecast(net, data.input(i), k)?.iter().enumerate() {
            sums[j] += weighted_sq(f, data.target(i + j), 1.0);
        }
    }
    Ok(sums.into_iter().map(|s| s / starts as f64).collect())
}
