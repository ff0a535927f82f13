//! Hölder-smooth target functions with analytic partial derivatives.

use std::fmt;
use std::sync::Arc;

use crate::{Error, Result};

type Eval = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type Partial = Arc<dyn Fn(&[usize], &[f64]) -> f64 + Send + Sync>;

/// A function `f: [0,1]^t → R` in the Hölder ball of smoothness `beta` and radius `k`,
/// together with every partial derivative `∂^α f`, `|α| < beta`.
#[derive(Clone)]
pub struct HolderFunction {
    pub name: String,
    pub t: usize,
    pub beta: f64,
    pub k: f64,
    f: Eval,
    partial: Partial,
}

impl fmt::Debug for HolderFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HolderFunction")
            .field("name", &self.name)
            .field("t", &self.t)
            .field("beta", &self.beta)
            .field("k", &self.k)
            .finish()
    }
}

impl HolderFunction {
    /// `partial(α, x)` must return `∂^α f(x)` for every multi-index with `|α| < beta`;
    /// `α = 0` is `f` itself.
    pub fn new(
        name: impl Into<String>,
        t: usize,
        beta: f64,
        k: f64,
        f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        partial: impl Fn(&[usize], &[f64]) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        if t == 0 {
            return Err(Error::Precondition("input dimension t must be positive".into()));
        }
        if !(beta >= 1.0) || !beta.is_finite() {
            return Err(Error::Precondition(format!("smoothness beta must be at least 1, got {beta}")));
        }
        if !(k > 0.0) || !k.is_finite() {
            return Err(Error::Precondition(format!("radius K must be positive, got {k}")));
        }
        Ok(HolderFunction { name: name.into(), t, beta, k, f: Arc::new(f), partial: Arc::new(partial) })
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }

    pub fn partial(&self, alpha: &[usize], x: &[f64]) -> f64 {
        (self.partial)(alpha, x)
    }

    /// Largest total degree `|α|` with `|α| < beta`.
    pub fn max_degree(&self) -> usize {
        (self.beta.ceil() as usize).saturating_sub(1)
    }

    /// Lipschitz constant of `f` with respect to the max norm implied by the Hölder
    /// radius: `|∂_j f| ≤ K` for each `j`, so `t K`.
    pub fn lipschitz(&self) -> f64 {
        self.t as f64 * self.k
    }

    /// Taylor coefficients in monomial form at `a`:
    /// `Σ_{|α|<β} ∂^α f(a) (y-a)^α/α! = Σ_γ c_γ(a) y^γ`, returned in the order of
    /// [`multi_indices`]`(t, max_degree)`.
    pub fn taylor_coefficients(&self, a: &[f64]) -> Vec<f64> {
        let indices = multi_indices(self.t, self.max_degree());
        let derivs: Vec<f64> = indices.iter().map(|alpha| self.partial(alpha, a)).collect();
        indices
            .iter()
            .map(|gamma| {
                indices
                    .iter()
                    .zip(&derivs)
                    .filter(|(alpha, _)| alpha.iter().zip(gamma).all(|(al, g)| al >= g))
                    .map(|(alpha, d)| {
                        let mut term = *d;
                        for j in 0..self.t {
                            let diff = alpha[j] - gamma[j];
                            term *= (-a[j]).powi(diff as i32) / (factorial(gamma[j]) * factorial(diff));
                        }
                        term
                    })
                    .sum()
            })
            .collect()
    }

    /// Spot checks: `|f| ≤ K` on a lattice and first partials against central
    /// differences. Returns human-readable findings; empty means nothing suspicious.
    pub fn diagnose(&self, points_per_axis: usize) -> Vec<String> {
        let mut issues = Vec::new();
        let n = points_per_axis.max(2);
        let total = n.saturating_pow(self.t as u32).min(100_000);
        let h = 1e-6;
        for idx in 0..total {
            let mut rest = idx;
            let x: Vec<f64> = (0..self.t)
                .map(|_| {
                    let i = rest % n;
                    rest /= n;
                    i as f64 / (n - 1) as f64
                })
                .collect();
            let v = self.eval(&x);
            if v.abs() > self.k + 1e-12 {
                issues.push(format!("|f({x:?})| = {} exceeds K = {}", v.abs(), self.k));
            }
            if self.max_degree() >= 1 {
                for j in 0..self.t {
                    let mut alpha = vec![0; self.t];
                    alpha[j] = 1;
                    let (mut lo, mut hi) = (x.clone(), x.clone());
                    lo[j] -= h;
                    hi[j] += h;
                    let fd = (self.eval(&hi) - self.eval(&lo)) / (2.0 * h);
                    let an = self.partial(&alpha, &x);
                    if (fd - an).abs() > 1e-3 * (1.0 + an.abs()) {
                        issues.push(format!("∂_{j} f({x:?}) = {an} but finite difference gives {fd}"));
                    }
                }
            }
            if issues.len() >= 10 {
                break;
            }
        }
        issues
    }
}

/// All multi-indices in `N^t` with total degree at most `max_degree`, ordered by degree
/// and then lexicographically (descending in the first coordinate).
pub fn multi_indices(t: usize, max_degree: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for degree in 0..=max_degree {
        let mut current = vec![0; t];
        fill(&mut out, &mut current, 0, degree);
    }
    out
}

fn fill(out: &mut Vec<Vec<usize>>, current: &mut Vec<usize>, pos: usize, remaining: usize) {
    if pos + 1 == current.len() {
        current[pos] = remaining;
        out.push(current.clone());
        return;
    }
    for v in (0..=remaining).rev() {
        current[pos] = v;
        fill(out, current, pos + 1, remaining - v);
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|v| v as f64).product()
}

/// Named test functions used by the certificate suite and the CLI.
pub mod catalog {
    use super::*;

    pub const NAMES: [&str; 4] = ["zero", "linear", "product2", "sin2"];

    pub fn by_name(name: &str) -> Result<HolderFunction> {
        match name {
            "zero" => zero(2),
            "linear" => linear(),
            "product2" => product2(),
            "sin2" => sin2(),
            other => Err(Error::Config(format!("unknown catalog function {other:?}; known: {}", NAMES.join(", ")))),
        }
    }

    /// `f ≡ 0` on `[0,1]^t`, radius 1.
    pub fn zero(t: usize) -> Result<HolderFunction> {
        HolderFunction::new("zero", t, 2.0, 1.0, |_| 0.0, |_, _| 0.0)
    }

    /// `f(x) = x` on `[0,1]`, β = 2, K = 2.
    pub fn linear() -> Result<HolderFunction> {
        HolderFunction::new("linear", 1, 2.0, 2.0, |x| x[0], |a, x| match a[0] {
            0 => x[0],
            1 => 1.0,
            _ => 0.0,
        })
    }

    /// `f(x) = x₁ x₂`, β = 2, K = 5.
    pub fn product2() -> Result<HolderFunction> {
        HolderFunction::new("product2", 2, 2.0, 5.0, |x| x[0] * x[1], |a, x| match (a[0], a[1]) {
            (0, 0) => x[0] * x[1],
            (1, 0) => x[1],
            (0, 1) => x[0],
            (1, 1) => 1.0,
            _ => 0.0,
        })
    }

    /// `f(x) = sin(x₁ + x₂)/4`, β = 2, K = 2.
    pub fn sin2() -> Result<HolderFunction> {
        HolderFunction::new(
            "sin2",
            2,
            2.0,
            2.0,
            |x| 0.25 * (x[0] + x[1]).sin(),
            |a, x| {
                // every derivative of order n is sin shifted by n quarter turns
                let n = a.iter().sum::<usize>();
                0.25 * (x[0] + x[1] + n as f64 * std::f64::consts::FRAC_PI_2).sin()
            },
        )
    }

    /// `f(x) = x` restricted to one coordinate of `[0,1]^t` (used for pass-through stages).
    pub fn coordinate(t: usize, j: usize) -> Result<HolderFunction> {
        if j >= t {
            return Err(Error::Precondition(format!("coordinate {j} out of range for t = {t}")));
        }
        HolderFunction::new(
            format!("coordinate{j}"),
            t,
            2.0,
            2.0,
            move |x| x[j],
            move |a, x| {
                let deg: usize = a.iter().sum();
                match deg {
                    0 => x[j],
                    1 if a[j] == 1 => 1.0,
                    _ => 0.0,
                }
            },
        )
    }

    /// Mean of the `t` coordinates, β = 2, K = 2.
    pub fn mean(t: usize) -> Result<HolderFunction> {
        HolderFunction::new(
            format!("mean{t}"),
            t,
            2.0,
            2.0,
            move |x| x.iter().sum::<f64>() / t as f64,
            move |a, x| match a.iter().sum::<usize>() {
                0 => x.iter().sum::<f64>() / t as f64,
                1 => 1.0 / t as f64,
                _ => 0.0,
            },
        )
    }
}
