//! Statistical properties of the simulators against closed forms and long-run oracles.

use ednet::simulate::{estimate_fdm, generate, high_d_model, lag_embed, low_d_model, prediction_error_mc, Scaler, Series, TimeSeriesModel};
use ednet::train::WeightFn;
use proptest::prelude::*;

/// Means and standard errors of per-block statistics.
fn batch_mean(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn autocovariance(x: &[f64], k: usize) -> f64 {
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    let n = x.len() - k;
    (0..n).map(|i| (x[i] - mean) * (x[i + k] - mean)).sum::<f64>() / n as f64
}

#[test]
fn ar1_autocovariance_matches_closed_form() {
    let (a, sd) = (0.7, 1.0);
    let model = TimeSeriesModel::ar1(a, sd, 21).unwrap();
    let series = generate(&model, 100_000, 1000).unwrap();
    let x = series.values();
    for k in 0..=5 {
        let blocks: Vec<f64> = x.chunks(2000).map(|b| autocovariance(b, k)).collect();
        let (est, se) = batch_mean(&blocks);
        let truth = sd * sd * a.powi(k as i32) / (1.0 - a * a);
        // blockwise estimates carry an O(1/block) bias well inside the band
        assert!((est - truth).abs() <= 3.0 * se, "k={k}: {est} vs {truth} (se {se})");
    }
}

#[test]
fn stable_linear_model_has_zero_mean() {
    let series = generate(&low_d_model(4), 20_000, 1000).unwrap();
    for j in 0..series.dim() {
        let col: Vec<f64> = series.rows().map(|r| r[j]).collect();
        let blocks: Vec<f64> = col.chunks(500).map(|b| b.iter().sum::<f64>() / b.len() as f64).collect();
        let (mean, se) = batch_mean(&blocks);
        assert!(mean.abs() <= 3.0 * se, "coordinate {j}: mean {mean}, se {se}");
    }
}

#[test]
fn high_d_series_stays_bounded() {
    let model = high_d_model(2);
    assert!(model.spectral_radius().unwrap() < 1.0);
    let sd = model.stationary_sd().unwrap();
    let worst_sd = sd.iter().cloned().fold(0.0, f64::max);
    let series = generate(&model, 10_000, 1000).unwrap();
    let worst = series.values().iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    assert!(worst < 10.0 * worst_sd, "max |X| = {worst}, stationary sd up to {worst_sd}");
}

#[test]
fn prediction_error_of_zero_predictor_matches_long_run_average() {
    let model = low_d_model(6);
    let d = model.d as f64;
    let est = prediction_error_mc(|_| vec![0.0; 5], &model, &WeightFn::ConstantOne, 20_000).unwrap();
    // oracle: noise variance plus the long-run mean of |f0(X)|²/d on an independent path
    let oracle_model = TimeSeriesModel { seed: 1234, ..low_d_model(0) };
    let path = generate(&oracle_model, 1_000_000, 1000).unwrap();
    let signal: Vec<f64> = path
        .rows()
        .map(|x| oracle_model.apply(x).unwrap().iter().map(|v| v * v).sum::<f64>() / d)
        .collect();
    let blocks: Vec<f64> = signal.chunks(10_000).map(|b| b.iter().sum::<f64>() / b.len() as f64).collect();
    let (mean, se) = batch_mean(&blocks);
    let oracle = 0.25 + mean;
    assert!(
        (est.estimate - oracle).abs() <= 3.0 * (est.std_error + se),
        "{} ± {} vs oracle {oracle} ± {se}",
        est.estimate,
        est.std_error
    );
}

#[test]
fn dependence_measure_decreases_in_k() {
    let model = TimeSeriesModel::ar1(0.6, 1.0, 3).unwrap();
    let est: Vec<_> = (0..8).map(|k| estimate_fdm(&model, k, 2.0, 20_000).unwrap()).collect();
    for w in est.windows(2) {
        assert!(w[1].estimate <= w[0].estimate + 3.0 * (w[0].std_error + w[1].std_error), "{w:?}");
    }
    assert!(estimate_fdm(&model, 1001, 2.0, 100).is_err());
}

#[test]
fn halving_paths_doubles_variance() {
    let reps = 1000;
    let spread = |n_mc: usize| {
        let values: Vec<f64> = (0..reps)
            .map(|s| estimate_fdm(&TimeSeriesModel::ar1(0.7, 1.0, 10_000 + s).unwrap(), 1, 2.0, n_mc).unwrap().estimate)
            .collect();
        let mean = values.iter().sum::<f64>() / reps as f64;
        values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (reps - 1) as f64
    };
    let ratio = spread(100) / spread(200);
    assert!((1.5..=2.5).contains(&ratio), "variance ratio {ratio}");
}

proptest! {
    #[test]
    fn scaler_round_trip(rows in prop::collection::vec(prop::collection::vec(-1e3..1e3f64, 3), 2..40)) {
        let series = Series::from_rows(&rows).unwrap();
        if let Ok(scaler) = Scaler::fit(&series) {
            for row in series.rows() {
                let mut x = row.to_vec();
                scaler.transform(&mut x);
                prop_assert!(x.iter().all(|v| (-1e-12..=1.0 + 1e-12).contains(v)));
                scaler.inverse(&mut x);
                for (a, b) in x.iter().zip(row) {
                    prop_assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()));
                }
            }
        }
    }

    #[test]
    fn lag_embedding_pairs(n in 3usize..30, r in 1usize..3) {
        prop_assume!(n > r);
        let rows: Vec<Vec<f64>> = (0..n).map(|t| vec![t as f64, -(t as f64)]).collect();
        let data = lag_embed(&Series::from_rows(&rows).unwrap(), r, false).unwrap();
        prop_assert_eq!(data.len(), n - r);
        for i in 0..data.len() {
            let t = i + r;
            prop_assert_eq!(data.target(i), &rows[t][..]);
            for l in 0..r {
                prop_assert_eq!(&data.input(i)[2 * l..2 * l + 2], &rows[t - 1 - l][..]);
            }
        }
    }
}
