//! JSON serialization.
//!
//! ```json
//! {"format": "ednet-v1", "arch": {"L": 1, "L1": 1, "p": [2, 3, 1]},
//!  "weights": [[...row-major p1×p0...], [...]], "biases": [[...]]}
//! ```
//!
//! Floats are written in shortest round-trip form, so parsing reproduces every bit.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{Architecture, Network};
use crate::{Error, Result};

pub const FORMAT_TAG: &str = "ednet-v1";

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    format: String,
    arch: Architecture,
    weights: Vec<Vec<f64>>,
    biases: Vec<Vec<f64>>,
}

impl Network {
    pub fn to_json(&self) -> Result<String> {
        if let Some(bad) = self.weights().iter().flat_map(|w| w.iter()).chain(self.biases().iter().flat_map(|b| b.iter())).find(|v| !v.is_finite()) {
            return Err(Error::Numeric(format!("cannot serialize non-finite parameter {bad}")));
        }
        let doc = Document {
            format: FORMAT_TAG.to_string(),
            arch: self.arch().clone(),
            weights: self
                .weights()
                .iter()
                .map(|w| {
                    let mut v = Vec::with_capacity(w.len());
                    for r in 0..w.nrows() {
                        v.extend(w.row(r).iter());
                    }
                    v
                })
                .collect(),
            biases: self.biases().iter().map(|b| b.as_slice().to_vec()).collect(),
        };
        Ok(serde_json::to_string(&doc)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: Document = serde_json::from_str(text)?;
        if doc.format != FORMAT_TAG {
            return Err(Error::Format(format!("unsupported network format {:?}, expected {FORMAT_TAG:?}", doc.format)));
        }
        let arch = doc.arch;
        arch.validate()?;
        if doc.weights.len() != arch.depth + 1 {
            return Err(Error::Format(format!("expected {} weight arrays, got {}", arch.depth + 1, doc.weights.len())));
        }
        let mut weights = Vec::with_capacity(doc.weights.len());
        for (i, flat) in doc.weights.into_iter().enumerate() {
            let (rows, cols) = (arch.widths[i + 1], arch.widths[i]);
            if flat.len() != rows * cols {
                return Err(Error::Format(format!("weights[{i}] has {} entries, expected {rows}×{cols}", flat.len())));
            }
            weights.push(DMatrix::from_row_slice(rows, cols, &flat));
        }
        let biases = doc.biases.into_iter().map(DVector::from_vec).collect();
        Network::new(arch, weights, biases)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Network::from_json(&std::fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    #[test]
    fn round_trip_is_bit_exact() {
        let mut rng = rng::stream(41, 0);
        for widths in [vec![2, 3, 2], vec![5, 20, 10, 1, 10, 20, 5], vec![4, 4]] {
            let mut arch = Architecture::new(widths).unwrap();
            if arch.depth >= 3 {
                arch = arch.with_bottleneck(3).unwrap();
            }
            let net = Network::random(arch, &mut rng).unwrap();
            let back = Network::from_json(&net.to_json().unwrap()).unwrap();
            assert_eq!(net.arch(), back.arch());
            for (a, b) in net.weights().iter().zip(back.weights()) {
                assert!(a.iter().zip(b.iter()).all(|(x, y)| x.to_bits() == y.to_bits()));
            }
            for (a, b) in net.biases().iter().zip(back.biases()) {
                assert!(a.iter().zip(b.iter()).all(|(x, y)| x.to_bits() == y.to_bits()));
            }
        }
    }

    #[test]
    fn weights_are_row_major() {
        let arch = Architecture::new(vec![2, 2]).unwrap();
        let net = Network::new(arch, vec![DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0])], vec![]).unwrap();
        let text = net.to_json().unwrap();
        assert!(text.contains("[[1.0,2.0,3.0,4.0]]"), "{text}");
        assert!(text.contains("\"format\":\"ednet-v1\""));
    }

    #[test]
    fn rejects_bad_documents() {
        let good = Network::identity(2).to_json().unwrap();
        assert!(Network::from_json(&good.replace("ednet-v1", "ednet-v0")).is_err());
        assert!(Network::from_json(&good.replace("\"biases\"", "\"extra\":1,\"biases\"")).is_err());
        assert!(Network::from_json(&good.replace("[[1.0,0.0,0.0,1.0]]", "[[1.0,0.0,0.0]]")).is_err());
    }

    #[test]
    fn refuses_non_finite() {
        let mut net = Network::identity(2);
        net.weights_mut()[0][(0, 0)] = f64::NAN;
        assert!(net.to_json().unwrap_err().is_numeric());
    }
}
