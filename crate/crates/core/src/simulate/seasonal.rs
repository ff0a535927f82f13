//! Synthetic seasonal series standing in for multi-site daily temperatures.

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::model::draw_noise;
use super::series::Series;
use crate::{rng, Error, Result};

/// `X_t = s(t) + Y_t` with `s_j(t) = mean_j + amp_j sin(2π t/period + phase_j)` and
/// `Y_t = A Y_{t-1} + B Y_{t-2} + ε_t`, where `A` couples sites through a common factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeasonalModel {
    pub d: usize,
    pub period: f64,
    pub mean: Vec<f64>,
    pub amplitude: Vec<f64>,
    pub phase: Vec<f64>,
    /// Own-lag coefficient of the anomaly at lag 1.
    pub persistence: f64,
    /// Own-lag coefficient at lag 2.
    pub second_lag: f64,
    /// Weight of the cross-site mean anomaly at lag 1.
    pub coupling: f64,
    pub noise_sd: f64,
    pub seed: u64,
}

impl SeasonalModel {
    /// Eight sites with yearly cycle, site-specific climates and a shared weather factor.
    pub fn eight_sites(seed: u64) -> Self {
        let mut rng = rng::stream(seed ^ 0x05ea_50a1, rng::STREAM_GENERATE);
        let d = 8;
        let mean = (0..d).map(|_| rng.random_range(6.0..12.0)).collect();
        let amplitude = (0..d).map(|_| rng.random_range(7.0..10.0)).collect();
        let phase = (0..d).map(|_| rng.random_range(-0.3..0.3)).collect();
        SeasonalModel {
            d,
            period: 365.25,
            mean,
            amplitude,
            phase,
            persistence: 0.3,
            second_lag: 0.1,
            coupling: 0.1,
            noise_sd: 2.0,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.d;
        if d == 0 || self.mean.len() != d || self.amplitude.len() != d || self.phase.len() != d {
            return Err(Error::Config(format!("seasonal model needs mean, amplitude and phase of length d = {d}")));
        }
        let a = self.persistence.abs() + self.coupling.abs() + self.second_lag.abs();
        if !(a < 1.0) {
            return Err(Error::Config(format!("seasonal anomaly recursion is not contractive: |coefficients| sum to {a}")));
        }
        if !(self.period > 0.0) || !(self.noise_sd >= 0.0) {
            return Err(Error::Config("seasonal period must be positive and noise_sd nonnegative".into()));
        }
        Ok(())
    }

    pub fn seasonal_mean(&self, t: usize) -> Vec<f64> {
        let angle = 2.0 * std::f64::consts::PI * t as f64 / self.period;
        (0..self.d).map(|j| self.mean[j] + self.amplitude[j] * (angle + self.phase[j]).sin()).collect()
    }

    pub fn generate(&self, n: usize, burn_in: usize) -> Result<Series> {
        self.validate()?;
        let d = self.d;
        let a = DMatrix::from_fn(d, d, |i, j| {
            self.coupling / d as f64 + if i == j { self.persistence } else { 0.0 }
        });
        let mut rng = rng::stream(self.seed, rng::STREAM_GENERATE);
        let (mut y1, mut y2) = (nalgebra::DVector::zeros(d), nalgebra::DVector::zeros(d));
        let mut noise = vec![0.0; d];
        let mut values = Vec::with_capacity(n * d);
        for step in 0..burn_in + n {
            draw_noise(&mut rng, self.noise_sd, &mut noise);
            let y = &a * &y1 + self.second_lag * &y2 + nalgebra::DVector::from_column_slice(&noise);
            y2 = std::mem::replace(&mut y1, y);
            if step >= burn_in {
                let t = step - burn_in;
                values.extend(self.seasonal_mean(t).iter().zip(y1.iter()).map(|(s, y)| s + y));
            }
        }
        Series::new(d, values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_and_determinism() {
        let m = SeasonalModel::eight_sites(1);
        let s = m.generate(800, 100).unwrap();
        assert_eq!((s.len(), s.dim()), (800, 8));
        assert_eq!(s, m.generate(800, 100).unwrap());
        let bad = SeasonalModel { persistence: 0.95, ..m };
        assert!(bad.generate(10, 0).is_err());
    }
}
