//! Functional-dependence rate function
//! `Λ^dep(x) = √x ȳ(x)`, `ȳ(x)` the smallest `y > 0` with `Ṽ(√x y) ≤ y`, where
//! `Ṽ(z) = √z + Σ_{j≥0} min{√z, Δ(j)}`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Terms below this fraction of the running comparison value end a direct summation.
const SERIES_TOL: f64 = 1e-15;

/// A decreasing, summable sequence `Δ(j)`, `j ≥ 0`.
#[derive(Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DeltaSequence {
    /// `Δ(j) = κ j^{-α}` for `j ≥ 1` and `Δ(0) = ∞`.
    Polynomial { kappa: f64, alpha: f64 },
    /// `Δ(j) = κ ρ^j`.
    Geometric { kappa: f64, rho: f64 },
    /// Explicit values, zero beyond the table.
    Table { values: Vec<f64> },
    /// Arbitrary sequence summed directly up to `horizon` terms.
    #[serde(skip)]
    Custom { f: Arc<dyn Fn(u64) -> f64 + Send + Sync>, horizon: u64 },
}

impl fmt::Debug for DeltaSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DeltaSequence::Polynomial { kappa, alpha } => write!(f, "Polynomial {{ kappa: {kappa}, alpha: {alpha} }}"),
            DeltaSequence::Geometric { kappa, rho } => write!(f, "Geometric {{ kappa: {kappa}, rho: {rho} }}"),
            DeltaSequence::Table { values } => write!(f, "Table {{ {} values }}", values.len()),
            DeltaSequence::Custom { horizon, .. } => write!(f, "Custom {{ horizon: {horizon} }}"),
        }
    }
}

impl DeltaSequence {
    pub fn validate(&self) -> Result<()> {
        match self {
            DeltaSequence::Polynomial { kappa, alpha } => {
                if !(*kappa >= 0.0 && *alpha > 1.0) {
                    return Err(Error::Precondition(format!(
                        "polynomial dependence needs kappa ≥ 0 and alpha > 1, got kappa = {kappa}, alpha = {alpha}"
                    )));
                }
            }
            DeltaSequence::Geometric { kappa, rho } => {
                if !(*kappa >= 0.0 && *rho > 0.0 && *rho < 1.0) {
                    return Err(Error::Precondition(format!(
                        "geometric dependence needs kappa ≥ 0 and rho in (0,1), got kappa = {kappa}, rho = {rho}"
                    )));
                }
            }
            DeltaSequence::Table { values } => {
                if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                    return Err(Error::Precondition("dependence table entries must be finite and nonnegative".into()));
                }
                if values.windows(2).any(|w| w[1] > w[0]) {
                    return Err(Error::Precondition("dependence table must be decreasing".into()));
                }
            }
            DeltaSequence::Custom { f, horizon } => {
                let mut prev = f64::INFINITY;
                for j in 0..(*horizon).min(100_000) {
                    let v = f(j);
                    if v.is_nan() || v < 0.0 || v > prev {
                        return Err(Error::Precondition(format!("dependence sequence is not decreasing and nonnegative at j = {j}")));
                    }
                    prev = v;
                }
            }
        }
        Ok(())
    }

    pub fn value(&self, j: u64) -> f64 {
        match self {
            DeltaSequence::Polynomial { kappa, alpha } => {
                if j == 0 {
                    f64::INFINITY
                } else {
                    kappa * (j as f64).powf(-alpha)
                }
            }
            DeltaSequence::Geometric { kappa, rho } => kappa * rho.powf(j as f64),
            DeltaSequence::Table { values } => values.get(j as usize).copied().unwrap_or(0.0),
            DeltaSequence::Custom { f, .. } => f(j),
        }
    }

    /// `Σ_{j≥q} Δ(j)`.
    pub fn tail_sum(&self, q: u64) -> Result<f64> {
        match self {
            DeltaSequence::Polynomial { kappa, alpha } => {
                if q == 0 {
                    return Ok(f64::INFINITY);
                }
                Ok(kappa * hurwitz_zeta(*alpha, q as f64))
            }
            DeltaSequence::Geometric { kappa, rho } => Ok(kappa * rho.powf(q as f64) / (1.0 - rho)),
            DeltaSequence::Table { values } => Ok(values.iter().skip(q as usize).sum()),
            DeltaSequence::Custom { f, horizon } => {
                let mut total = 0.0;
                let mut j = q;
                loop {
                    if j >= *horizon {
                        return Err(Error::Numeric(format!(
                            "dependence series not summable within horizon {horizon} (partial sum {total})"
                        )));
                    }
                    let v = f(j);
                    total += v;
                    if v <= SERIES_TOL * total || v == 0.0 {
                        return Ok(total);
                    }
                    j += 1;
                }
            }
        }
    }

    /// `Σ_{j≥0} min{s, Δ(j)}`.
    pub fn capped_sum(&self, s: f64) -> Result<f64> {
        if s <= 0.0 {
            return Ok(0.0);
        }
        // Δ is decreasing: the first `cut` terms are capped at s, the rest are Δ(j)
        let cut = match self {
            DeltaSequence::Polynomial { kappa, alpha } => {
                if *kappa == 0.0 {
                    1
                } else {
                    let mut j = ((kappa / s).powf(1.0 / alpha).floor() as u64).max(1);
                    while j > 1 && self.value(j - 1) < s {
                        j -= 1;
                    }
                    while self.value(j) >= s {
                        j += 1;
                    }
                    j
                }
            }
            DeltaSequence::Geometric { kappa, rho } => {
                if *kappa < s {
                    0
                } else {
                    let mut j = ((s / kappa).ln() / rho.ln()).floor().max(0.0) as u64;
                    while j > 0 && self.value(j - 1) < s {
                        j -= 1;
                    }
                    while self.value(j) >= s {
                        j += 1;
                    }
                    j
                }
            }
            DeltaSequence::Table { values } => values.iter().take_while(|v| **v >= s).count() as u64,
            DeltaSequence::Custom { horizon, .. } => {
                let mut j = 0;
                while j < *horizon && self.value(j) >= s {
                    j += 1;
                }
                if j == *horizon {
                    return Err(Error::Numeric(format!("dependence sequence stays above {s} up to horizon {horizon}")));
                }
                j
            }
        };
        Ok(cut as f64 * s + self.tail_sum(cut)?)
    }

    /// `Ṽ(z) = √z + Σ_j min{√z, Δ(j)}`.
    pub fn v_tilde(&self, z: f64) -> Result<f64> {
        let s = z.max(0.0).sqrt();
        Ok(s + self.capped_sum(s)?)
    }

    /// `Λ^dep(x) = √x ȳ(x)`.
    ///
    /// `Ṽ` is concave with `Ṽ(0) = 0`, so `Ṽ(√x y)/y` decreases in `y` and the admissible
    /// `y` form a half-line whose left end is found by bisection.
    pub fn lambda(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) || !x.is_finite() {
            return Err(Error::Precondition(format!("rate function argument must be positive, got {x}")));
        }
        self.validate()?;
        let root = x.sqrt();
        let admissible = |y: f64| -> Result<bool> { Ok(self.v_tilde(root * y)? <= y) };
        let mut hi = root;
        let mut steps = 0;
        while !admissible(hi)? {
            hi *= 2.0;
            steps += 1;
            if steps > 2000 {
                return Err(Error::Numeric(format!("no fixed point of the variance proxy found for x = {x}")));
            }
        }
        let mut lo = hi / 2.0;
        while admissible(lo)? {
            lo /= 2.0;
            if lo < f64::MIN_POSITIVE {
                return Ok(0.0);
            }
        }
        while (hi - lo) > 1e-13 * hi {
            let mid = 0.5 * (lo + hi);
            if admissible(mid)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(root * hi)
    }

    /// Shape of the known upper bound: `max{x^{α/(α+1)}, x}` for polynomial decay,
    /// `x max{1, log(1/x)}²` for geometric decay, `x` for the zero sequence.
    pub fn envelope_shape(&self, x: f64) -> Option<f64> {
        match self {
            DeltaSequence::Polynomial { alpha, .. } => Some(x.powf(alpha / (alpha + 1.0)).max(x)),
            DeltaSequence::Geometric { .. } => Some(x * (1.0 / x).ln().max(1.0).powi(2)),
            DeltaSequence::Table { values } if values.iter().all(|v| *v == 0.0) => Some(x),
            _ => None,
        }
    }
}

/// Hurwitz zeta `ζ(s, a) = Σ_{k≥0} (a + k)^{-s}` for `s > 1`, `a > 0`, by
/// Euler–Maclaurin summation.
pub fn hurwitz_zeta(s: f64, a: f64) -> f64 {
    const DIRECT: usize = 12;
    // B_2, B_4, …, B_14 divided by (2j)!
    const B_OVER_FACT: [f64; 7] = [
        1.0 / 6.0 / 2.0,
        -1.0 / 30.0 / 24.0,
        1.0 / 42.0 / 720.0,
        -1.0 / 30.0 / 40_320.0,
        5.0 / 66.0 / 3_628_800.0,
        -691.0 / 2730.0 / 479_001_600.0,
        7.0 / 6.0 / 87_178_291_200.0,
    ];
    let mut total = 0.0;
    for k in 0..DIRECT {
        total += (a + k as f64).powf(-s);
    }
    let b = a + DIRECT as f64;
    total += b.powf(1.0 - s) / (s - 1.0) + 0.5 * b.powf(-s);
    let mut rising = s;
    let mut power = b.powf(-s - 1.0);
    for (j, coef) in B_OVER_FACT.iter().enumerate() {
        total += coef * rising * power;
        let k = (2 * j) as f64;
        rising *= (s + k + 1.0) * (s + k + 2.0);
        power /= b * b;
    }
    total
}
