//! Rate calculus for dependent data: the rate functions `Λ^mix` and `Λ^dep`, block
//! lengths `q*`, the covering-entropy bound, the choice of `N` and the predicted rates.
//!
//! The theorems only assert existence of their constants, so every bound here is
//! evaluated with constant 1 and is meaningful up to a multiplicative constant.

mod conjugate;
mod dependence;
mod entropy;

use serde::{Deserialize, Serialize};

pub use conjugate::YoungFunction;
pub use dependence::{hurwitz_zeta, DeltaSequence};
pub use entropy::{choose_n, entropy_bound, predicted_rate, SmoothnessProfile};

use crate::{Error, Result};

/// Largest block length `q_star` searches before giving up.
pub const Q_STAR_CAP: u64 = 1 << 32;

/// Decay model of the dependence between observations.
///
/// The constants `c₀`, `C_{β,sub}`, `θ` and `L_G` of the dependence assumptions only
/// enter unreported constants and are therefore not parameters here.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DependenceSpec {
    /// `Σ k^{α-1} β(k) < ∞`, represented by `β(k) = min{1, κ k^{-(α+1)}}`.
    MixingPolynomial { alpha: f64, kappa: f64 },
    /// `β(k) ≤ κ ρ^k`.
    MixingExponential { rho: f64, kappa: f64 },
    /// Functional dependence measure bounded by `delta`.
    Functional { delta: DeltaSequence },
    Independent {},
}

impl DependenceSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            DependenceSpec::MixingPolynomial { alpha, kappa } => {
                YoungFunction::polynomial(*alpha)?;
                check_kappa(*kappa)
            }
            DependenceSpec::MixingExponential { rho, kappa } => {
                YoungFunction::exponential(*rho)?;
                check_kappa(*kappa)
            }
            DependenceSpec::Functional { delta } => delta.validate(),
            DependenceSpec::Independent {} => Ok(()),
        }
    }

    /// The Young function of a mixing spec.
    pub fn young(&self) -> Option<YoungFunction> {
        match *self {
            DependenceSpec::MixingPolynomial { alpha, .. } => YoungFunction::polynomial(alpha).ok(),
            DependenceSpec::MixingExponential { rho, .. } => YoungFunction::exponential(rho).ok(),
            _ => None,
        }
    }

    /// `Λ^mix` for mixing specs, `Λ^dep` for functional ones, `x` for independence.
    pub fn lambda(&self, x: f64) -> Result<f64> {
        self.validate()?;
        match self {
            DependenceSpec::Functional { delta } => delta.lambda(x),
            DependenceSpec::Independent {} => {
                if !(x > 0.0) || !x.is_finite() {
                    return Err(Error::Precondition(format!("rate function argument must be positive, got {x}")));
                }
                Ok(x)
            }
            _ => self.young().expect("validated").lambda(x),
        }
    }

    /// Explicit upper envelope of `Λ` where one is known with constants: the mixing
    /// envelopes, and `x` itself for independence. For functional dependence this is
    /// the shape only, without its constant.
    pub fn envelope(&self, x: f64) -> Option<f64> {
        match self {
            DependenceSpec::Functional { delta } => delta.envelope_shape(x),
            DependenceSpec::Independent {} => Some(x),
            _ => self.young().map(|f| f.envelope(x)),
        }
    }

    /// Dependence coefficient `β(q)`: the representative mixing sequence, or
    /// `β^dep(q) = Σ_{j≥q} Δ(j)` for functional dependence.
    pub fn beta(&self, q: u64) -> Result<f64> {
        Ok(match self {
            DependenceSpec::MixingPolynomial { alpha, kappa } => {
                if q == 0 {
                    1.0
                } else {
                    (kappa * (q as f64).powf(-(alpha + 1.0))).min(1.0)
                }
            }
            DependenceSpec::MixingExponential { rho, kappa } => {
                if q == 0 {
                    1.0
                } else {
                    (kappa * rho.powf(q as f64)).min(1.0)
                }
            }
            DependenceSpec::Functional { delta } => delta.tail_sum(q)?,
            DependenceSpec::Independent {} => {
                if q == 0 {
                    1.0
                } else {
                    0.0
                }
            }
        })
    }

    /// `C = Σ_k (φ*(k+1) - φ*(k)) β(k)` for the representative mixing sequence, the
    /// constant in `q*(x) x ≤ 2C Λ^mix(x)`.
    pub fn mixing_constant(&self) -> Result<f64> {
        self.validate()?;
        let phi = self
            .young()
            .ok_or_else(|| Error::Precondition("the mixing constant needs a mixing spec".into()))?;
        const TERMS: u64 = 1_000_000;
        let mut total = 0.0;
        let mut prev = phi.phi_star(0.0);
        for k in 0..TERMS {
            let next = phi.phi_star((k + 1) as f64);
            let term = (next - prev) * self.beta(k)?;
            prev = next;
            total += term;
            if k > 10 && term < 1e-17 * total {
                return Ok(total);
            }
        }
        match *self {
            // terms behave like α C_α κ k^{-2}; the tail beyond TERMS is bounded by
            // its integral with a little slack
            DependenceSpec::MixingPolynomial { alpha, kappa } => {
                Ok(total + 2.0 * alpha * YoungFunction::polynomial_constant(alpha) * kappa / (TERMS - 1) as f64)
            }
            _ => Err(Error::Numeric("mixing constant series did not converge".into())),
        }
    }
}

fn check_kappa(kappa: f64) -> Result<()> {
    if !(kappa > 0.0) || !kappa.is_finite() {
        return Err(Error::Precondition(format!("kappa must be positive, got {kappa}")));
    }
    Ok(())
}

/// `q*(x) = min{q ≥ 1 : β(q) ≤ q x}` for a decreasing sequence `β`.
///
/// The condition is monotone in `q`, so an admissible `q` is bracketed by doubling
/// and the smallest one located by binary search.
pub fn q_star(beta: impl Fn(u64) -> Result<f64>, x: f64) -> Result<u64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Precondition(format!("q* needs a positive argument, got {x}")));
    }
    let ok = |q: u64| -> Result<bool> { Ok(beta(q)? <= q as f64 * x) };
    if ok(1)? {
        return Ok(1);
    }
    let mut hi = 2;
    while !ok(hi)? {
        if hi >= Q_STAR_CAP {
            return Err(Error::Numeric(format!("dependence coefficient does not fall below q x = {x} q for q ≤ 2^32")));
        }
        hi *= 2;
    }
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// `Λ(N log(n)³/n) + N^{-2A}`, the right-hand side of the convergence theorems with
/// their constant set to 1.
pub fn bound_theorem(spec: &DependenceSpec, n: f64, big_n: f64, profile: &SmoothnessProfile) -> Result<f64> {
    if !(n >= 2.0) || !(big_n >= 1.0) {
        return Err(Error::Precondition(format!("bound needs n ≥ 2 and N ≥ 1, got n = {n}, N = {big_n}")));
    }
    let a = profile.exponent()?;
    Ok(spec.lambda(big_n * n.ln().powi(3) / n)? + big_n.powf(-2.0 * a))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LambdaRow {
    pub x: f64,
    pub lambda: f64,
    pub envelope: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateRow {
    pub n: f64,
    #[serde(rename = "N")]
    pub big_n: u64,
    pub predicted_rate: f64,
    pub bound: f64,
}

pub fn lambda_table(spec: &DependenceSpec, xs: &[f64]) -> Result<Vec<LambdaRow>> {
    xs.iter()
        .map(|&x| Ok(LambdaRow { x, lambda: spec.lambda(x)?, envelope: spec.envelope(x) }))
        .collect()
}

/// `N`, the corollary rate and the theorem bound at `N` for each sample size. The
/// decay exponent `alpha` defaults to the polynomial-mixing one.
pub fn rate_table(spec: &DependenceSpec, alpha: f64, profile: &SmoothnessProfile, ns: &[f64]) -> Result<Vec<RateRow>> {
    ns.iter()
        .map(|&n| {
            let big_n = choose_n(n, alpha, profile)?;
            Ok(RateRow {
                n,
                big_n,
                predicted_rate: predicted_rate(n, alpha, profile)?,
                bound: bound_theorem(spec, n, big_n as f64, profile)?,
            })
        })
        .collect()
}
