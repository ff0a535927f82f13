//! Young functions `φ`, their convex conjugates `φ*(x) = sup_y {xy - φ(y)}`, and the
//! mixing rate function `Λ^mix(x) = ⌈ψ^{-1}(1/x)⌉ x` with `ψ(x) = x φ*(x)`.

use serde::Serialize;

use crate::{Error, Result};

/// Relative tolerance of every numerical root search in this module.
pub const TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum YoungFunction {
    /// `φ(x) = x^{α/(α-1)}`, matched to `Σ k^{α-1} β(k) < ∞`.
    Polynomial { alpha: f64 },
    /// `φ(x) = x log(x+1)/log(a)`, `a = (ρ+1)/(2ρ)`, matched to `β(k) ≤ κ ρ^k`.
    Exponential { a: f64 },
}

impl YoungFunction {
    pub fn polynomial(alpha: f64) -> Result<Self> {
        if !(alpha > 1.0) || !alpha.is_finite() {
            return Err(Error::Precondition(format!("polynomial decay needs alpha > 1, got {alpha}")));
        }
        Ok(YoungFunction::Polynomial { alpha })
    }

    pub fn exponential(rho: f64) -> Result<Self> {
        if !(rho > 0.0 && rho < 1.0) {
            return Err(Error::Precondition(format!("exponential decay needs rho in (0,1), got {rho}")));
        }
        Ok(YoungFunction::Exponential { a: (rho + 1.0) / (2.0 * rho) })
    }

    pub fn phi(&self, y: f64) -> f64 {
        match *self {
            YoungFunction::Polynomial { alpha } => y.powf(alpha / (alpha - 1.0)),
            YoungFunction::Exponential { a } => y * y.ln_1p() / a.ln(),
        }
    }

    pub fn phi_prime(&self, y: f64) -> f64 {
        match *self {
            YoungFunction::Polynomial { alpha } => {
                let p = alpha / (alpha - 1.0);
                p * y.powf(p - 1.0)
            }
            YoungFunction::Exponential { a } => (y.ln_1p() + y / (1.0 + y)) / a.ln(),
        }
    }

    /// `C_α = (1 - 1/α)^α / (α - 1)`, the constant in `φ*(x) = C_α x^α`.
    pub fn polynomial_constant(alpha: f64) -> f64 {
        (1.0 - 1.0 / alpha).powf(alpha) / (alpha - 1.0)
    }

    /// `φ*`, in closed form where one exists.
    pub fn phi_star(&self, x: f64) -> f64 {
        match *self {
            YoungFunction::Polynomial { alpha } => {
                if x <= 0.0 {
                    0.0
                } else {
                    Self::polynomial_constant(alpha) * x.powf(alpha)
                }
            }
            YoungFunction::Exponential { .. } => self.phi_star_numeric(x),
        }
    }

    /// `φ*` by maximising the concave objective `xy - φ(y)`: its derivative
    /// `x - φ'(y)` is decreasing, so the maximiser is bracketed by doubling and then
    /// bisected.
    pub fn phi_star_numeric(&self, x: f64) -> f64 {
        if x <= self.phi_prime(0.0) {
            return 0.0;
        }
        let mut hi = 1.0;
        while self.phi_prime(hi) < x {
            hi *= 2.0;
        }
        let mut lo = 0.0;
        while hi - lo > TOL * hi {
            let mid = 0.5 * (lo + hi);
            if self.phi_prime(mid) < x {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let y = 0.5 * (lo + hi);
        x * y - self.phi(y)
    }

    pub fn psi(&self, x: f64) -> f64 {
        x * self.phi_star(x)
    }

    /// Inverse of the increasing map `ψ` on `[0, ∞)`.
    pub fn psi_inverse(&self, y: f64) -> f64 {
        if y <= 0.0 {
            return 0.0;
        }
        match *self {
            YoungFunction::Polynomial { alpha } => (y / Self::polynomial_constant(alpha)).powf(1.0 / (alpha + 1.0)),
            YoungFunction::Exponential { .. } => {
                let mut hi = 1.0;
                while self.psi(hi) < y {
                    hi *= 2.0;
                }
                let mut lo = 0.0;
                while hi - lo > TOL * hi {
                    let mid = 0.5 * (lo + hi);
                    if self.psi(mid) < y {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                0.5 * (lo + hi)
            }
        }
    }

    /// `Λ^mix(x) = ⌈ψ^{-1}(1/x)⌉ x`.
    pub fn lambda(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) || !x.is_finite() {
            return Err(Error::Precondition(format!("rate function argument must be positive, got {x}")));
        }
        Ok(self.psi_inverse(1.0 / x).ceil() * x)
    }

    /// Explicit upper envelope of `Λ^mix`:
    /// polynomial `2 C_α^{-1/(α+1)} (x^{α/(α+1)} ∨ x)`; exponential
    /// `2(2 + log(1/x)/log a) x` for `x ≤ 1/e` and `2(1 + e/(a-1)) x` otherwise.
    pub fn envelope(&self, x: f64) -> f64 {
        match *self {
            YoungFunction::Polynomial { alpha } => {
                let c = 2.0 * Self::polynomial_constant(alpha).powf(-1.0 / (alpha + 1.0));
                c * x.powf(alpha / (alpha + 1.0)).max(x)
            }
            YoungFunction::Exponential { a } => {
                if x <= (-1.0f64).exp() {
                    2.0 * (2.0 + (1.0 / x).ln() / a.ln()) * x
                } else {
                    2.0 * (1.0 + std::f64::consts::E / (a - 1.0)) * x
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn log_grid(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
        let (a, b) = (lo.log10(), hi.log10());
        let n = ((b - a) * per_decade as f64).round() as usize;
        (0..=n).map(|i| 10f64.powf(a + (b - a) * i as f64 / n as f64)).collect()
    }

    #[test]
    fn alpha_two_at_one() {
        let f = YoungFunction::polynomial(2.0).unwrap();
        assert_eq!(YoungFunction::polynomial_constant(2.0), 0.25);
        assert!((f.psi(1.0) - 0.25).abs() < 1e-15);
        assert!((f.psi_inverse(1.0) - 4f64.powf(1.0 / 3.0)).abs() < 1e-12);
        assert_eq!(f.lambda(1.0).unwrap(), 2.0);
    }

    #[test]
    fn numeric_conjugate_matches_closed_form() {
        for alpha in [1.5, 2.0, 4.0] {
            let f = YoungFunction::polynomial(alpha).unwrap();
            for x in [0.01, 0.3, 1.0, 2.5, 40.0] {
                let closed = f.phi_star(x);
                let numeric = f.phi_star_numeric(x);
                assert!((closed - numeric).abs() <= 1e-9 * closed, "alpha={alpha} x={x}: {closed} vs {numeric}");
            }
        }
    }

    #[test]
    fn exponential_conjugate_satisfies_young_inequality() {
        let f = YoungFunction::exponential(0.5).unwrap();
        for x in [0.5, 1.0, 3.0, 10.0] {
            let star = f.phi_star(x);
            for y in [0.0, 0.1, 1.0, 5.0, 50.0] {
                assert!(x * y <= f.phi(y) + star + 1e-9);
            }
            // the two-sided bounds a^{x-1} - 1 ≤ φ*(x) ≤ 2x(a^x - 1) for x ≥ 1
            if let YoungFunction::Exponential { a } = f {
                if x >= 1.0 {
                    assert!(star >= a.powf(x - 1.0) - 1.0 - 1e-12);
                    assert!(star <= 2.0 * x * (a.powf(x) - 1.0) + 1e-12);
                }
            }
        }
    }

    #[test]
    fn psi_inverse_round_trip() {
        for f in [YoungFunction::polynomial(3.0).unwrap(), YoungFunction::exponential(0.3).unwrap()] {
            for y in [1e-3, 1.0, 10.0, 1e6] {
                let x = f.psi_inverse(y);
                assert!((f.psi(x) - y).abs() <= 1e-9 * y, "{f:?} {y}");
            }
        }
    }

    #[test]
    fn polynomial_envelope_holds() {
        for alpha in [1.5, 2.0, 4.0] {
            let f = YoungFunction::polynomial(alpha).unwrap();
            for x in log_grid(1e-8, 1e3, 20) {
                assert!(f.lambda(x).unwrap() <= f.envelope(x) * (1.0 + 1e-12), "alpha={alpha} x={x}");
            }
        }
    }

    #[test]
    fn exponential_envelope_holds() {
        for rho in [0.2, 0.5, 0.9] {
            let f = YoungFunction::exponential(rho).unwrap();
            for x in log_grid(1e-8, 1e3, 20) {
                assert!(f.lambda(x).unwrap() <= f.envelope(x) * (1.0 + 1e-12), "rho={rho} x={x}");
            }
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(YoungFunction::polynomial(1.0).is_err());
        assert!(YoungFunction::exponential(1.0).is_err());
        assert!(YoungFunction::polynomial(2.0).unwrap().lambda(0.0).is_err());
    }
}
