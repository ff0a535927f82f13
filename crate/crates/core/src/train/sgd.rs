use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::backprop::gradient;
use super::{empirical_risk, WeightFn};
use crate::network::Network;
use crate::simulate::LagDataset;
use crate::{rng, Error, Result};

fn default_batch_size() -> usize {
    32
}

/// SGD settings. `lr_schedule` lists `(epoch, rate)` pairs: from epoch `epoch`
/// (0-based) on, the rate is `rate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainConfig {
    pub epochs: usize,
    pub lr_schedule: Vec<(usize, f64)>,
    /// Coefficient of the `λ‖θ‖²` weight decay.
    #[serde(default)]
    pub l2_lambda: f64,
    #[serde(default = "default_batch_size")]
    pub batch_size: usize,
    #[serde(default)]
    pub seed: u64,
    /// Clip every entry to `[-1, 1]` after each step.
    #[serde(default)]
    pub project_entries: bool,
    /// Keep only the `s` largest entries in magnitude after training.
    #[serde(default)]
    pub prune_to_s: Option<usize>,
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.lr_schedule.is_empty() {
            return Err(Error::Config("lr_schedule must have at least one (epoch, rate) pair".into()));
        }
        if self.lr_schedule[0].0 != 0 {
            return Err(Error::Config("lr_schedule must start at epoch 0".into()));
        }
        for (i, pair) in self.lr_schedule.windows(2).enumerate() {
            if pair[1].0 <= pair[0].0 {
                return Err(Error::Config(format!(
                    "lr_schedule epochs must increase strictly: entry {} ({}) follows {}",
                    i + 1,
                    pair[1].0,
                    pair[0].0
                )));
            }
        }
        if let Some((_, lr)) = self.lr_schedule.iter().find(|(_, lr)| !(*lr >= 0.0) || !lr.is_finite()) {
            return Err(Error::Config(format!("learning rates must be finite and nonnegative, got {lr}")));
        }
        if !(self.l2_lambda >= 0.0) || !self.l2_lambda.is_finite() {
            return Err(Error::Config(format!("l2_lambda must be nonnegative, got {}", self.l2_lambda)));
        }
        if self.batch_size == 0 {
            return Err(Error::Config("batch_size must be positive".into()));
        }
        Ok(())
    }

    pub fn learning_rate(&self, epoch: usize) -> f64 {
        self.lr_schedule.iter().take_while(|(e, _)| *e <= epoch).last().map_or(0.0, |(_, lr)| *lr)
    }
}

/// One row of a learning curve; epoch 0 is the untrained network.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_risk: f64,
    pub test_risk: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrainReport {
    pub curve: Vec<EpochRecord>,
    /// Sum of squared entries removed by pruning.
    pub pruned_mass: f64,
}

impl TrainReport {
    pub fn final_record(&self) -> &EpochRecord {
        self.curve.last().expect("curve has the initial record")
    }

    /// `epoch,train_risk,test_risk` rows.
    pub fn curve_csv(&self) -> String {
        let mut out = String::from("epoch,train_risk,test_risk\n");
        for r in &self.curve {
            let test = r.test_risk.map_or(String::new(), |v| format!("{v:?}"));
            out.push_str(&format!("{},{:?},{test}\n", r.epoch, r.train_risk));
        }
        out
    }
}

/// Minibatch SGD on the weighted squared loss plus weight decay.
///
/// Every epoch reshuffles the pairs with the seeded shuffle stream. Training aborts
/// with [`Error::Diverged`] once the train risk exceeds `1e6` times its initial value.
pub fn train_sgd(
    net: &Network,
    data: &LagDataset,
    cfg: &TrainConfig,
    w: &WeightFn,
    test: Option<&LagDataset>,
) -> Result<(Network, TrainReport)> {
    cfg.validate()?;
    w.validate()?;
    let mut net = net.clone();
    let initial = empirical_risk(&net, data, w)?;
    let test_risk = |net: &Network| test.map(|t| empirical_risk(net, t, w)).transpose();
    let mut curve = vec![EpochRecord { epoch: 0, train_risk: initial, test_risk: test_risk(&net)? }];
    let mut rng = rng::stream(cfg.seed, rng::STREAM_SHUFFLE);
    let mut order: Vec<usize> = (0..data.len()).collect();
    for epoch in 0..cfg.epochs {
        let lr = cfg.learning_rate(epoch);
        order.shuffle(&mut rng);
        for batch in order.chunks(cfg.batch_size) {
            let g = gradient(&net, data, batch, w, cfg.l2_lambda)?;
            step(&mut net, &g, lr, cfg.project_entries);
        }
        let risk = empirical_risk(&net, data, w)?;
        if !risk.is_finite() || risk > 1e6 * initial.max(f64::MIN_POSITIVE) {
            return Err(Error::Diverged { epoch: epoch + 1, risk, initial });
        }
        curve.push(EpochRecord { epoch: epoch + 1, train_risk: risk, test_risk: test_risk(&net)? });
    }
    let mut pruned_mass = 0.0;
    if let Some(s) = cfg.prune_to_s {
        pruned_mass = prune(&mut net, s);
        let last = curve.last_mut().expect("initial record");
        last.train_risk = empirical_risk(&net, data, w)?;
        last.test_risk = test_risk(&net)?;
    }
    Ok((net, TrainReport { curve, pruned_mass }))
}

fn step(net: &mut Network, g: &super::Gradient, lr: f64, project: bool) {
    for (p, gp) in net.weights_mut().iter_mut().zip(&g.weights) {
        p.zip_apply(gp, |a, g| *a -= lr * g);
        if project {
            p.apply(|v| *v = v.clamp(-1.0, 1.0));
        }
    }
    for (p, gp) in net.biases_mut().iter_mut().zip(&g.biases) {
        p.zip_apply(gp, |a, g| *a -= lr * g);
        if project {
            p.apply(|v| *v = v.clamp(-1.0, 1.0));
        }
    }
}

/// Zeroes all but the `s` entries of largest magnitude (ties broken by position,
/// weights before biases, layer by layer, column-major). Returns the sum of squares
/// of the removed entries.
pub fn prune(net: &mut Network, s: usize) -> f64 {
    let mut entries: Vec<(f64, usize)> = Vec::new();
    let mut pos = 0;
    for m in net.weights() {
        for v in m.iter() {
            entries.push((v.abs(), pos));
            pos += 1;
        }
    }
    for b in net.biases() {
        for v in b.iter() {
            entries.push((v.abs(), pos));
            pos += 1;
        }
    }
    entries.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut keep = vec![false; pos];
    for &(_, p) in entries.iter().take(s) {
        keep[p] = true;
    }
    let mut removed = 0.0;
    let mut pos = 0;
    let mut visit = |v: &mut f64| {
        if !keep[pos] {
            removed += *v * *v;
            *v = 0.0;
        }
        pos += 1;
    };
    for m in net.weights_mut() {
        m.iter_mut().for_each(&mut visit);
    }
    for b in net.biases_mut() {
        b.iter_mut().for_each(&mut visit);
    }
    removed
}
