//! Monte Carlo functionals of a model: the prediction error `D(f)` and the functional
//! dependence measure `δ_q(k)`.
//!
//! Randomness is split deterministically: a sub-seed is drawn from the model seed's
//! dedicated stream, and work unit `b` (a block or a lane) uses lane `b` of that
//! sub-seed. Results are combined in unit order, so they do not depend on the thread
//! count.

use rand::RngCore;
use rayon::prelude::*;

use super::model::{draw_noise, Stepper, TimeSeriesModel, DEFAULT_BURN_IN};
use crate::train::WeightFn;
use crate::{rng, Error, Result};

/// Draws per independent path in [`prediction_error_mc`].
pub const MC_BLOCK: usize = 64;

/// Steps between consecutive draws on one path, beyond the lag window.
pub const MC_SPACING: usize = 20;

/// Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Estimate {
    pub estimate: f64,
    pub std_error: f64,
}

fn sub_seed(model: &TimeSeriesModel, stream: u64) -> u64 {
    rng::stream(model.seed, stream).next_u64()
}

/// `D(f) = (1/d) E[|X_{r+1} - f(𝕏_r)|² W(𝕏_r)]` under the stationary law.
///
/// Draws come in blocks of [`MC_BLOCK`]: each block starts a fresh path from zero lags,
/// discards [`DEFAULT_BURN_IN`] steps, then takes one draw every `r + MC_SPACING` steps.
/// The standard error treats the draws as independent.
pub fn prediction_error_mc<F>(f: F, model: &TimeSeriesModel, w: &WeightFn, n_mc: usize) -> Result<Estimate>
where
    F: Fn(&[f64]) -> Vec<f64> + Sync,
{
    model.validate()?;
    w.validate()?;
    if n_mc < 100 {
        return Err(Error::Precondition(format!("n_mc must be at least 100, got {n_mc}")));
    }
    let seed = sub_seed(model, rng::STREAM_PREDICTION_MC);
    let blocks = n_mc.div_ceil(MC_BLOCK);
    let per_block: Vec<Result<Vec<f64>>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let count = MC_BLOCK.min(n_mc - b * MC_BLOCK);
            let mut rng = rng::lane(seed, b as u64);
            let mut stepper = Stepper::new(model);
            let mut noise = vec![0.0; model.d];
            for _ in 0..DEFAULT_BURN_IN {
                stepper.step(&mut rng, &mut noise)?;
            }
            let mut out = Vec::with_capacity(count);
            for _ in 0..count {
                for _ in 0..model.r + MC_SPACING {
                    stepper.step(&mut rng, &mut noise)?;
                }
                let state = stepper.state().to_vec();
                let pred = f(&state);
                if pred.len() != model.d {
                    return Err(Error::dim("predictor output", model.d, pred.len()));
                }
                let x = stepper.step(&mut rng, &mut noise)?;
                let sq: f64 = x.iter().zip(&pred).map(|(a, b)| (a - b) * (a - b)).sum();
                out.push(sq / model.d as f64 * w.eval(&state));
            }
            Ok(out)
        })
        .collect();
    let mut values = Vec::with_capacity(n_mc);
    for block in per_block {
        values.extend(block?);
    }
    Ok(mean_and_error(&values))
}

fn mean_and_error(values: &[f64]) -> Estimate {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    Estimate { estimate: mean, std_error: (var / n).sqrt() }
}

/// Coupled-path estimate of `δ_q(k) = max_j ‖X_{ij} - X_{ij}^{*(i-k)}‖_q`.
///
/// From a stationary state the path is run `k + 1` steps twice, once with the
/// innovation `ε_{i-k}` replaced by an independent copy and otherwise identical noise.
/// Replications are spread over [`rng::STREAM_LANES`] lanes, each following one long
/// path (burn-in [`DEFAULT_BURN_IN`], then `r + 5` steps between replications). The
/// standard error of `m^{1/q}` comes from the delta method at the maximising coordinate.
pub fn estimate_fdm(model: &TimeSeriesModel, k: usize, q: f64, n_mc: usize) -> Result<Estimate> {
    model.validate()?;
    if k > DEFAULT_BURN_IN {
        return Err(Error::Precondition(format!("lag k = {k} exceeds the burn-in horizon {DEFAULT_BURN_IN}")));
    }
    if !(q >= 1.0) || !q.is_finite() {
        return Err(Error::Precondition(format!("moment order q must be at least 1, got {q}")));
    }
    if n_mc < 2 {
        return Err(Error::Precondition("need at least 2 replications".into()));
    }
    let d = model.d;
    let seed = sub_seed(model, rng::STREAM_FDM);
    let lanes = rng::STREAM_LANES as usize;
    let sums: Vec<Result<(Vec<f64>, Vec<f64>)>> = (0..lanes)
        .into_par_iter()
        .map(|lane| {
            let reps = n_mc / lanes + usize::from(lane < n_mc % lanes);
            let mut rng = rng::lane(seed, lane as u64);
            let mut path = Stepper::new(model);
            let mut twin = Stepper::new(model);
            let mut noise = vec![0.0; d];
            let mut swapped = vec![0.0; d];
            for _ in 0..DEFAULT_BURN_IN {
                path.step(&mut rng, &mut noise)?;
            }
            let (mut s1, mut s2) = (vec![0.0; d], vec![0.0; d]);
            for _ in 0..reps {
                twin.set_state(path.state());
                draw_noise(&mut rng, model.noise_sd, &mut noise);
                draw_noise(&mut rng, model.noise_sd, &mut swapped);
                path.step_with(&noise)?;
                twin.step_with(&swapped)?;
                for _ in 0..k {
                    draw_noise(&mut rng, model.noise_sd, &mut noise);
                    path.step_with(&noise)?;
                    twin.step_with(&noise)?;
                }
                for j in 0..d {
                    let v = (path.state()[j] - twin.state()[j]).abs().powf(q);
                    s1[j] += v;
                    s2[j] += v * v;
                }
                for _ in 0..model.r + 5 {
                    path.step(&mut rng, &mut noise)?;
                }
            }
            Ok((s1, s2))
        })
        .collect();
    let (mut s1, mut s2) = (vec![0.0; d], vec![0.0; d]);
    for lane in sums {
        let (a, b) = lane?;
        for j in 0..d {
            s1[j] += a[j];
            s2[j] += b[j];
        }
    }
    let n = n_mc as f64;
    let (j, m) = s1
        .iter()
        .map(|s| s / n)
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (j, m)| if m > best.1 { (j, m) } else { best });
    let var = ((s2[j] / n - m * m) * n / (n - 1.0)).max(0.0);
    let se_m = (var / n).sqrt();
    let delta = m.powf(1.0 / q);
    let std_error = if m > 0.0 { delta / (q * m) * se_m } else { 0.0 };
    Ok(Estimate { estimate: delta, std_error })
}

#[cfg(test)]
mod tests {
    use super::super::model::low_d_model;
    use super::*;

    #[test]
    fn truth_gives_noise_floor() {
        let model = low_d_model(4);
        let est = prediction_error_mc(|x| model.apply(x).unwrap(), &model, &WeightFn::ConstantOne, 20_000).unwrap();
        assert!((est.estimate - 0.25).abs() <= 3.0 * est.std_error, "{est:?}");
    }

    #[test]
    fn vanishing_weight_gives_zero() {
        // states sit near 10, far outside [0,1]^2 where the box ramp vanishes
        let f0: crate::simulate::Closure = std::sync::Arc::new(|_: &[f64]| vec![10.0, 10.0]);
        let model = TimeSeriesModel::new(2, 1, crate::simulate::EvolutionMap::Closure(f0), 0.5, 0).unwrap();
        let w = WeightFn::box_ramp(0.1).unwrap();
        let est = prediction_error_mc(|_| vec![0.0; 2], &model, &w, 500).unwrap();
        assert_eq!(est.estimate, 0.0);
        assert!(prediction_error_mc(|x| x.to_vec(), &model, &WeightFn::ConstantOne, 99).is_err());
    }

    #[test]
    fn iid_series_has_no_dependence() {
        let model = TimeSeriesModel::zero(2, 1, 1.0, 0).unwrap();
        for k in 1..4 {
            let est = estimate_fdm(&model, k, 2.0, 500).unwrap();
            assert_eq!(est.estimate, 0.0);
        }
        let at_zero = estimate_fdm(&model, 0, 2.0, 20_000).unwrap();
        assert!((at_zero.estimate - 2f64.sqrt()).abs() <= 3.0 * at_zero.std_error);
    }

    #[test]
    fn deterministic_regardless_of_threads() {
        let model = TimeSeriesModel::ar1(0.5, 1.0, 3).unwrap();
        let a = estimate_fdm(&model, 2, 2.0, 1000).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| estimate_fdm(&model, 2, 2.0, 1000).unwrap());
        assert_eq!(a, b);
    }
}
