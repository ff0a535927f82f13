use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Weight `W(x) ∈ [0,1]` multiplying each squared residual in the risk.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightFn {
    #[default]
    ConstantOne,
    /// 1 on `[ς, 1-ς]^{dr}`, 0 outside `[0,1]^{dr}`, linear in the sup distance between.
    BoxRamp { varsigma: f64 },
}

impl WeightFn {
    pub fn box_ramp(varsigma: f64) -> Result<Self> {
        let w = WeightFn::BoxRamp { varsigma };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            WeightFn::ConstantOne => Ok(()),
            WeightFn::BoxRamp { varsigma } if varsigma > 0.0 && varsigma < 0.5 => Ok(()),
            WeightFn::BoxRamp { varsigma } => {
                Err(Error::Config(format!("box_ramp needs varsigma in (0, 1/2), got {varsigma}")))
            }
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match *self {
            WeightFn::ConstantOne => 1.0,
            WeightFn::BoxRamp { varsigma } => {
                let dist = x
                    .iter()
                    .map(|&v| (varsigma - v).max(v - (1.0 - varsigma)).max(0.0))
                    .fold(0.0_f64, f64::max);
                1.0 - (dist / varsigma).clamp(0.0, 1.0)
            }
        }
    }

    /// Lipschitz constant with respect to the max norm.
    pub fn lipschitz(&self) -> f64 {
        match *self {
            WeightFn::ConstantOne => 0.0,
            WeightFn::BoxRamp { varsigma } => 1.0 / varsigma,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn box_ramp_values() {
        let w = WeightFn::box_ramp(0.1).unwrap();
        assert_eq!(w.eval(&[0.5; 4]), 1.0);
        assert_eq!(w.eval(&[0.5, -0.2]), 0.0);
        assert!((w.eval(&[0.05, 0.5]) - 0.5).abs() < 1e-12);
        assert!((w.eval(&[0.5, 0.95]) - 0.5).abs() < 1e-12);
        assert!(WeightFn::box_ramp(0.5).is_err());
        assert!(WeightFn::box_ramp(0.0).is_err());
    }

    proptest! {
        #[test]
        fn bounded_and_lipschitz(
            s in 0.01f64..0.49,
            x in prop::collection::vec(-0.5f64..1.5, 3),
            y in prop::collection::vec(-0.5f64..1.5, 3),
        ) {
            let w = WeightFn::box_ramp(s).unwrap();
            let (wx, wy) = (w.eval(&x), w.eval(&y));
            prop_assert!((0.0..=1.0).contains(&wx));
            let dist = x.iter().zip(&y).fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
            prop_assert!((wx - wy).abs() <= dist / s + 1e-12);
        }
    }
}
