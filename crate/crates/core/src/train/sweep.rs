use rand::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{empirical_risk, naive_predict, train_sgd, TrainConfig, WeightFn};
use crate::network::{Architecture, Network};
use crate::simulate::{lag_embed_with, Scaler, Series};
use crate::{rng, Error, Result};

/// Grid of lag counts `r` and bottleneck widths `m` for the architecture
/// `(rd, rd, hidden, m, hidden, d, d)` with the bottleneck at hidden layer 3.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub rs: Vec<usize>,
    pub ms: Vec<usize>,
    #[serde(default = "default_hidden")]
    pub hidden: usize,
    /// Independent initialisations per cell; the cell reports their mean.
    #[serde(default = "default_repeats")]
    pub repeats: usize,
    /// Min-max scale with the training series before embedding.
    #[serde(default)]
    pub normalize: bool,
}

fn default_hidden() -> usize {
    24
}

fn default_repeats() -> usize {
    1
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepCell {
    pub r: usize,
    pub m: usize,
    pub train_risk: f64,
    pub test_risk: f64,
    pub naive_risk: f64,
}

pub fn sweep_architecture(d: usize, r: usize, m: usize, hidden: usize) -> Result<Architecture> {
    Architecture::new(vec![r * d, r * d, hidden, m, hidden, d, d])?.with_bottleneck(3)
}

/// Trains every `(r, m)` cell on `train` and scores it on `test`. The test pairs of
/// lag `r` use the last `r` training rows as their first lag state, so every cell
/// is scored on the same targets. Cells run in parallel; output is in `rs × ms` order.
pub fn run_sweep(train: &Series, test: &Series, spec: &SweepSpec, cfg: &TrainConfig, w: &WeightFn) -> Result<Vec<SweepCell>> {
    if spec.rs.is_empty() || spec.ms.is_empty() || spec.repeats == 0 {
        return Err(Error::Config("sweep needs nonempty rs and ms and at least one repeat".into()));
    }
    if train.dim() != test.dim() {
        return Err(Error::dim("test series dimension", train.dim(), test.dim()));
    }
    cfg.validate()?;
    let scaler = if spec.normalize { Some(Scaler::fit(train)?) } else { None };
    let d = train.dim();
    let cells: Vec<(usize, usize, usize)> = spec
        .rs
        .iter()
        .flat_map(|&r| spec.ms.iter().map(move |&m| (r, m)))
        .enumerate()
        .map(|(i, (r, m))| (i, r, m))
        .collect();
    cells
        .into_par_iter()
        .map(|(index, r, m)| {
            let train_data = lag_embed_with(train, r, scaler.clone())?;
            if r > train.len() {
                return Err(Error::Precondition(format!("training series shorter than r = {r}")));
            }
            let joined = Series::new(d, [&train.values()[(train.len() - r) * d..], test.values()].concat())?;
            let test_data = lag_embed_with(&joined, r, scaler.clone())?;
            let arch = sweep_architecture(d, r, m, spec.hidden)?;
            let (mut train_risk, mut test_risk) = (0.0, 0.0);
            for rep in 0..spec.repeats {
                let seed = rng::lane(cfg.seed, (index * spec.repeats + rep) as u64).next_u64();
                let net = Network::initial(arch.clone(), &mut rng::stream(seed, rng::STREAM_INIT))?;
                let cell_cfg = TrainConfig { seed, ..cfg.clone() };
                let (trained, _) = train_sgd(&net, &train_data, &cell_cfg, w, None)?;
                train_risk += empirical_risk(&trained, &train_data, w)?;
                test_risk += empirical_risk(&trained, &test_data, w)?;
            }
            let k = spec.repeats as f64;
            Ok(SweepCell {
                r,
                m,
                train_risk: train_risk / k,
                test_risk: test_risk / k,
                naive_risk: naive_predict(&test_data, w)?,
            })
        })
        .collect()
}

/// Test risks as a matrix: one row per `r`, one column per `m`.
pub fn sweep_table_csv(cells: &[SweepCell], spec: &SweepSpec) -> String {
    let mut out = String::from("r");
    for m in &spec.ms {
        out.push_str(&format!(",m{m}"));
    }
    out.push('\n');
    for r in &spec.rs {
        out.push_str(&r.to_string());
        for m in &spec.ms {
            let cell = cells.iter().find(|c| c.r == *r && c.m == *m);
            out.push_str(&cell.map_or(",".to_string(), |c| format!(",{:?}", c.test_risk)));
        }
        out.push('\n');
    }
    out
}

pub fn best_cell(cells: &[SweepCell]) -> Option<&SweepCell> {
    cells.iter().min_by(|a, b| a.test_risk.total_cmp(&b.test_risk))
}
