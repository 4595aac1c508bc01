//! Convergence-rate toolkit: moduli of smoothness, Steklov regularization,
//! and empirical checks of the quantitative error bounds.
//!
//! Every bound check reports pointwise (lhs, rhs) rows; a point holds when
//! lhs <= rhs + [`BOUND_SLACK`]. Moduli are grid suprema and therefore lower
//! bounds of the true values, so checks whose right side contains a modulus
//! refine the modulus grid before declaring a violation.

mod checks;
mod dbv;
mod modulus;
mod steklov;

pub use checks::{
    dt_bound_constant, korovkin_check, lipschitz_check, local_bound_check, steklov_bound_check,
    voronovskaja_check, weighted_convergence_check, DtConstant,
};
pub use dbv::{dbv_bound_check, DbvSpec};
pub use modulus::{
    dt_modulus, modulus1, modulus2, weighted_modulus, DtGrid, ModulusEstimate, ModulusKind,
};
pub use steklov::{steklov_mean, SteklovMean};

use crate::appell::AppellPair;
use crate::engine::{EngineError, OperatorSpec};
use crate::kernel::KernelParams;

/// Slack added to the right side before a pointwise comparison.
pub const BOUND_SLACK: f64 = 1e-12;

pub fn default_x_grid() -> Vec<f64> {
    vec![0.1, 0.25, 0.5, 1.0, 2.0, 4.0]
}

/// 16, 32, ..., 1024.
pub fn default_n_grid() -> Vec<u32> {
    (4..=10).map(|j| 1u32 << j).collect()
}

/// One operator shape swept over n.
#[derive(Debug, Clone)]
pub struct OperatorFamily {
    pair: AppellPair,
    rho: f64,
    c: u32,
}

impl OperatorFamily {
    pub fn new(pair: AppellPair, rho: f64, c: u32) -> Result<Self, EngineError> {
        KernelParams::new(1.0, rho, c)?;
        Ok(OperatorFamily { pair, rho, c })
    }

    pub fn at(&self, n: f64) -> Result<OperatorSpec, EngineError> {
        Ok(OperatorSpec::new(
            self.pair.clone(),
            KernelParams::new(n, self.rho, self.c)?,
        ))
    }

    pub fn pair(&self) -> &AppellPair {
        &self.pair
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn c(&self) -> u32 {
        self.c
    }
}

/// One grid point of a bound comparison.
#[derive(Debug, Clone, Copy)]
pub struct BoundPoint {
    pub n: f64,
    pub x: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Outcome of a bound check over its grid.
#[derive(Debug, Clone)]
pub struct BoundCheckResult {
    pub theorem: &'static str,
    pub points: Vec<BoundPoint>,
    /// min over points of rhs - lhs.
    pub margin: f64,
    pub constants: Vec<(String, f64)>,
}

impl BoundCheckResult {
    pub(crate) fn assemble(
        theorem: &'static str,
        points: Vec<BoundPoint>,
        constants: Vec<(String, f64)>,
    ) -> Self {
        let margin = points
            .iter()
            .map(|p| p.rhs - p.lhs)
            .fold(f64::INFINITY, f64::min);
        BoundCheckResult {
            theorem,
            points,
            margin,
            constants,
        }
    }

    pub fn all_hold(&self) -> bool {
        self.points.iter().all(|p| p.holds)
    }

    pub fn constant(&self, name: &str) -> Option<f64> {
        self.constants
            .iter()
            .find(|(k, _)| k == name)
            .map(|&(_, v)| v)
    }
}

pub(crate) fn bound_point(n: f64, x: f64, lhs: f64, rhs: f64) -> BoundPoint {
    BoundPoint {
        n,
        x,
        lhs,
        rhs,
        holds: lhs <= rhs + BOUND_SLACK,
    }
}
