//! Numerical kernels shared by the rest of the crate: log-gamma, symmetric
//! tridiagonal eigenvalues, Gauss rules with log-space weights, deterministic
//! adaptive panel quadrature, half-line integration, and 1/n limit
//! extrapolation.

mod adaptive;
mod eigen;
mod extrapolate;
mod gamma;
mod gauss;
mod halfline;

pub use extrapolate::{extrapolate_limit, LimitFit};
pub use gamma::{gamma_ratio, log_gamma};
pub use halfline::{integrate_halfline, Tail};

pub(crate) use adaptive::integrate_segments;
pub(crate) use gamma::lgamma;
pub(crate) use gauss::{gauss_legendre, laguerre_gamma};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Accuracy request for iterative quadrature.
///
/// `max_refinements` bounds how often an integrator may double its order or
/// split panels before giving up.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default)]
pub struct Accuracy {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_refinements: u32,
}

impl Default for Accuracy {
    fn default() -> Self {
        Accuracy {
            rel_tol: 1e-10,
            abs_tol: 1e-14,
            max_refinements: 8,
        }
    }
}

/// Integral value with an a-posteriori error estimate.
#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
}

#[derive(Debug, Error)]
pub enum NumericsError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("requested accuracy not reached: value {value:e}, error estimate {error:.3e}")]
    AccuracyNotReached { value: f64, error: f64 },
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("sequence has no finite 1/n limit: fit residual {residual:.3e} against scale {scale:.3e}")]
    NoLimit { residual: f64, scale: f64 },
    #[error("{0} did not converge")]
    NoConvergence(&'static str),
}

/// Neumaier-compensated accumulator; keeps long positive-term sums accurate
/// to a few ulps even when terms span many orders of magnitude.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}
