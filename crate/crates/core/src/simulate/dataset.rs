use serde::{Deserialize, Serialize};

use super::series::Series;
use crate::{Error, Result};

/// Per-coordinate min-max scaling of a series onto `[0,1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scaler {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl Scaler {
    pub fn fit(series: &Series) -> Result<Scaler> {
        let d = series.dim();
        let mut min = vec![f64::INFINITY; d];
        let mut max = vec![f64::NEG_INFINITY; d];
        for row in series.rows() {
            for j in 0..d {
                min[j] = min[j].min(row[j]);
                max[j] = max[j].max(row[j]);
            }
        }
        if let Some(j) = (0..d).find(|&j| !(max[j] > min[j])) {
            return Err(Error::Precondition(format!(
                "coordinate x{} is constant over the series; min-max scaling is degenerate",
                j + 1
            )));
        }
        Ok(Scaler { min, max })
    }

    pub fn dim(&self) -> usize {
        self.min.len()
    }

    /// Scales a vector made of whole series rows (a target or a lag state).
    pub fn transform(&self, x: &mut [f64]) {
        let d = self.dim();
        for (i, v) in x.iter_mut().enumerate() {
            let j = i % d;
            *v = (*v - self.min[j]) / (self.max[j] - self.min[j]);
        }
    }

    pub fn inverse(&self, x: &mut [f64]) {
        let d = self.dim();
        for (i, v) in x.iter_mut().enumerate() {
            let j = i % d;
            *v = *v * (self.max[j] - self.min[j]) + self.min[j];
        }
    }

    pub fn transform_series(&self, series: &Series) -> Result<Series> {
        if series.dim() != self.dim() {
            return Err(Error::dim("scaled series", self.dim(), series.dim()));
        }
        let mut values = series.values().to_vec();
        self.transform(&mut values);
        Series::new(series.dim(), values)
    }
}

/// Pairs `(𝕏_{i-1}, X_i)` of a series with `𝕏_{i-1} = (X_{i-1}, …, X_{i-r})`.
#[derive(Debug, Clone, PartialEq)]
pub struct LagDataset {
    r: usize,
    d: usize,
    /// Length of the series the pairs came from; the risk normalises by it.
    series_len: usize,
    inputs: Vec<f64>,
    targets: Vec<f64>,
    scaler: Option<Scaler>,
}

impl LagDataset {
    pub fn r(&self) -> usize {
        self.r
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn input_dim(&self) -> usize {
        self.r * self.d
    }

    pub fn series_len(&self) -> usize {
        self.series_len
    }

    /// Number of pairs, `n - r`.
    pub fn len(&self) -> usize {
        self.targets.len() / self.d
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn input(&self, i: usize) -> &[f64] {
        let k = self.input_dim();
        &self.inputs[i * k..(i + 1) * k]
    }

    pub fn target(&self, i: usize) -> &[f64] {
        &self.targets[i * self.d..(i + 1) * self.d]
    }

    pub fn scaler(&self) -> Option<&Scaler> {
        self.scaler.as_ref()
    }
}

/// Lag embedding of `series`; with `normalize` the scaler is fitted to `series` first.
pub fn lag_embed(series: &Series, r: usize, normalize: bool) -> Result<LagDataset> {
    let scaler = if normalize { Some(Scaler::fit(series)?) } else { None };
    lag_embed_with(series, r, scaler)
}

/// Lag embedding with a given (for example training-set) scaler.
pub fn lag_embed_with(series: &Series, r: usize, scaler: Option<Scaler>) -> Result<LagDataset> {
    if r == 0 {
        return Err(Error::Precondition("lag count r must be at least 1".into()));
    }
    let n = series.len();
    if n <= r {
        return Err(Error::Precondition(format!("series of length {n} is too short for r = {r} lags")));
    }
    let d = series.dim();
    let scaled;
    let source = match &scaler {
        Some(s) => {
            scaled = s.transform_series(series)?;
            &scaled
        }
        None => series,
    };
    let mut inputs = Vec::with_capacity((n - r) * r * d);
    let mut targets = Vec::with_capacity((n - r) * d);
    for i in r..n {
        for lag in 1..=r {
            inputs.extend_from_slice(source.row(i - lag));
        }
        targets.extend_from_slice(source.row(i));
    }
    Ok(LagDataset { r, d, series_len: n, inputs, targets, scaler })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(rows: &[&[f64]]) -> Series {
        Series::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn one_lag() {
        let s = series(&[&[1.0], &[2.0], &[3.0]]);
        let ds = lag_embed(&s, 1, false).unwrap();
        assert_eq!(ds.len(), 2);
        assert_eq!((ds.input(0), ds.target(0)), (&[1.0][..], &[2.0][..]));
        assert_eq!((ds.input(1), ds.target(1)), (&[2.0][..], &[3.0][..]));
    }

    #[test]
    fn two_lags_newest_first() {
        let s = series(&[&[1.0, 10.0], &[2.0, 20.0], &[3.0, 30.0], &[4.0, 40.0], &[5.0, 50.0]]);
        let ds = lag_embed(&s, 2, false).unwrap();
        let want: [(&[f64], &[f64]); 3] = [
            (&[2.0, 20.0, 1.0, 10.0], &[3.0, 30.0]),
            (&[3.0, 30.0, 2.0, 20.0], &[4.0, 40.0]),
            (&[4.0, 40.0, 3.0, 30.0], &[5.0, 50.0]),
        ];
        assert_eq!(ds.len(), 3);
        for (i, (x, y)) in want.iter().enumerate() {
            assert_eq!(ds.input(i), *x);
            assert_eq!(ds.target(i), *y);
        }
        assert!(lag_embed(&s, 5, false).is_err());
    }

    #[test]
    fn normalisation() {
        let s = series(&[&[1.0, -3.0], &[2.0, 5.0], &[4.0, 1.0], &[3.0, 0.123]]);
        let ds = lag_embed(&s, 2, true).unwrap();
        for i in 0..ds.len() {
            assert!(ds.input(i).iter().all(|v| (0.0..=1.0).contains(v)));
        }
        let sc = ds.scaler().unwrap();
        let mut x = vec![0.3, 1e3, -7.25, 0.123];
        let orig = x.clone();
        sc.transform(&mut x);
        sc.inverse(&mut x);
        for (a, b) in x.iter().zip(&orig) {
            assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
        }
        let flat = series(&[&[1.0, 2.0], &[1.0, 3.0]]);
        let err = lag_embed(&flat, 1, true).unwrap_err().to_string();
        assert!(err.contains("x1"), "{err}");
    }
}
