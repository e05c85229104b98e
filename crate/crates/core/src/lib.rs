//! Numerical toolkit for weighted trigonometric approximation.
//!
//! The library is organized around a decaying weight sequence ψ on `[1, ∞)`:
//!
//! * [`psi_core`]: weight specifications, the half-value point η, the ratio
//!   μ = t/(η(t) − t), sampled classification, tail integrals, and the
//!   closed-form admissibility thresholds for the exponential family.
//! * [`trig_poly`]: trigonometric polynomials in coefficient form, staged
//!   cosine sums and their closed form, averaged means, truncated kernels
//!   Ψ_{β,n}, the (ψ, β) derivative/integral pair, and convolution.
//! * [`norms`]: L_p and sup norms, grid sampling, and duality pairings.
//! * [`approx`]: best-approximation solvers: discrete minimax with off-grid
//!   polish, exact L₂ projection, and smoothed descent for other L_s.
//! * [`bounds`]: parameter validation, extremal-polynomial construction, and
//!   report generation for the two-sided error bounds and their lemmas.

pub mod approx;
pub mod bounds;
pub mod norms;
pub mod psi_core;
pub mod tol;
pub mod trig_poly;

use thiserror::Error;

/// Error type shared across the workspace.
#[derive(Debug, Error)]
pub enum Error {
    /// Input outside the mathematical domain of an operation.
    #[error("domain: {0}")]
    Domain(String),
    /// Requested value outside the attainable range of an operation.
    #[error("range: {0}")]
    Range(String),
    /// Structurally invalid argument (sizes, signs, orderings).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// A stated hypothesis of the verified inequality does not hold.
    #[error("precondition: {0}")]
    Precondition(String),
    /// An iterative scheme exhausted its budget before meeting tolerance.
    #[error("did not converge: {0}")]
    Convergence(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Compensated (Kahan) accumulator for long floating-point sums.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Kahan {
    sum: f64,
    carry: f64,
}

impl Kahan {
    pub(crate) fn add(&mut self, x: f64) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub(crate) fn value(self) -> f64 {
        self.sum
    }
}

#[cfg(test)]
mod tests {
    use super::Kahan;

    #[test]
    fn kahan_compensates_small_terms() {
        let mut acc = Kahan::default();
        acc.add(1.0);
        for _ in 0..1_000_000 {
            acc.add(1e-16);
        }
        let plain: f64 = (0..1_000_000).fold(1.0, |s, _| s + 1e-16);
        let exact = 1.0 + 1e-10;
        assert!((acc.value() - exact).abs() < 1e-15);
        // the plain sum loses every small term; the compensated one must not
        assert!((plain - 1.0).abs() < 1e-12);
    }
}
