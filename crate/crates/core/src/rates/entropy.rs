//! Covering-entropy bound of sparse network classes and the resulting choice of `N`.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// `(s+1) log(2^{2L+5} δ^{-1} (L+1) p_0² p_{L+1}² s^{2L})`, evaluated as a sum of
/// logarithms so large classes do not overflow.
pub fn entropy_bound(depth: usize, p0: usize, p_out: usize, s: usize, delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::Precondition(format!("delta must lie in (0, 1], got {delta}")));
    }
    if s == 0 || p0 == 0 || p_out == 0 {
        return Err(Error::Precondition("s, p_0 and p_{L+1} must be positive".into()));
    }
    let l = depth as f64;
    let log_inner = (2.0 * l + 5.0) * std::f64::consts::LN_2 - delta.ln()
        + (l + 1.0).ln()
        + 2.0 * (p0 as f64).ln()
        + 2.0 * (p_out as f64).ln()
        + 2.0 * l * (s as f64).ln();
    Ok((s as f64 + 1.0) * log_inner)
}

/// Smoothness triples `(β_k, t_k)` of the composed stages.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SmoothnessProfile {
    pub stages: Vec<(f64, f64)>,
}

impl SmoothnessProfile {
    pub fn new(stages: Vec<(f64, f64)>) -> Result<Self> {
        let profile = SmoothnessProfile { stages };
        profile.exponent()?;
        Ok(profile)
    }

    /// `A = min_k β_k / t_k`.
    pub fn exponent(&self) -> Result<f64> {
        if self.stages.is_empty() {
            return Err(Error::Precondition("smoothness profile has no stages".into()));
        }
        let mut a = f64::INFINITY;
        for &(beta, t) in &self.stages {
            if !(beta > 0.0) || !(t >= 1.0) {
                return Err(Error::Precondition(format!("stage smoothness needs beta > 0 and t ≥ 1, got ({beta}, {t})")));
            }
            a = a.min(beta / t);
        }
        Ok(a)
    }
}

fn rate_exponent(alpha: f64, a: f64) -> f64 {
    let mix = alpha / (alpha + 1.0);
    mix / (2.0 * a + mix)
}

/// `N = ⌈n^{a/(2A+a)}⌉` with `a = α/(α+1)`.
///
/// A power that lands within `1e-9` (relative) of an integer is taken to be that
/// integer so the ceiling does not jump on rounding noise.
pub fn choose_n(n: f64, alpha: f64, profile: &SmoothnessProfile) -> Result<u64> {
    check_n_alpha(n, alpha)?;
    let v = n.powf(rate_exponent(alpha, profile.exponent()?));
    let r = v.round();
    Ok(if (v - r).abs() <= 1e-9 * r { r as u64 } else { v.ceil() as u64 })
}

/// `n^{-2A a/(2A+a)} log(n)^{3a}` with `a = α/(α+1)`.
pub fn predicted_rate(n: f64, alpha: f64, profile: &SmoothnessProfile) -> Result<f64> {
    check_n_alpha(n, alpha)?;
    let a = profile.exponent()?;
    let mix = alpha / (alpha + 1.0);
    Ok(n.powf(-2.0 * a * rate_exponent(alpha, a)) * n.ln().powf(3.0 * mix))
}

fn check_n_alpha(n: f64, alpha: f64) -> Result<()> {
    if !(n >= 2.0) {
        return Err(Error::Precondition(format!("sample size must be at least 2, got {n}")));
    }
    if !(alpha > 1.0) {
        return Err(Error::Precondition(format!("alpha must exceed 1, got {alpha}")));
    }
    Ok(())
}
