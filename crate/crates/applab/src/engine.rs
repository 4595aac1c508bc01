//! The operators themselves: the discrete form
//!
//! ```text
//! T_n(f; x) = sum_{i>=0} w_i(nx) f(i/n)
//! ```
//!
//! and the kernel-smoothed form
//!
//! ```text
//! S_n(f; x) = sum_{i>=1} w_i(nx) int phi_i(zeta) f(zeta) dzeta + w_0(nx) f(0),
//! ```
//!
//! with presets, an exact raw-moment route, and a grid evaluator that reuses
//! the x-independent kernel integrals across a whole x grid.

use rayon::prelude::*;
use thiserror::Error;

use crate::appell::{AppellError, AppellPair, WeightSequence};
use crate::functions::FunctionHandle;
use crate::kernel::{IntegrandHints, KernelError, KernelParams};
use crate::numerics::{Accuracy, CompensatedSum, NumericsError};

/// Weights this many orders below the peak weight contribute less than the
/// truncation budget and are skipped.
const WEIGHT_SKIP: f64 = 1e-18;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Appell(#[from] AppellError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("x = {x} is outside the precomputed grid range [0, {x_max}]")]
    OutsideGrid { x: f64, x_max: f64 },
}

/// Which boundary weight multiplies f(0) in the smoothed operator.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum AtomConvention {
    /// p_0(nx) e^{-nx}, the weight the generating identity assigns to i = 0;
    /// keeps S(1; x) = 1.
    #[default]
    Consistent,
    /// a_0 e^{nx} + b_0 e^{-nx} as published; O(1) after normalization, so
    /// it visibly breaks S(1; x) = 1. Kept for reconciliation runs.
    AsPrinted,
}

#[derive(Debug, Clone, Copy)]
pub struct EvalOptions {
    /// Weight-sequence truncation budget.
    pub weight_eps: f64,
    pub quadrature: Accuracy,
    pub atom: AtomConvention,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            weight_eps: 1e-12,
            quadrature: Accuracy::default(),
            atom: AtomConvention::Consistent,
        }
    }
}

/// A smoothed operator at fixed (pair, n, rho, c).
#[derive(Debug, Clone)]
pub struct OperatorSpec {
    pair: AppellPair,
    kernel: KernelParams,
}

/// Operator families constructible by name.
#[derive(Debug, Clone)]
pub enum Preset {
    /// Discrete operator with Poisson weights.
    Szasz { n: f64 },
    /// Smoothed operator, Poisson weights, rho = 1, c = 0.
    Phillips { n: f64 },
    /// Smoothed operator, Poisson weights, free rho and c.
    SzaszPaltanea { n: f64, rho: f64, c: u32 },
    /// Smoothed operator over an arbitrary two-sided pair.
    A2Family {
        a: Vec<f64>,
        b: Vec<f64>,
        n: f64,
        rho: f64,
        c: u32,
    },
}

/// Either operator form under one interface.
#[derive(Debug, Clone)]
pub enum Operator {
    Discrete { pair: AppellPair, n: f64 },
    Smoothed(OperatorSpec),
}

impl Operator {
    pub fn preset(preset: Preset) -> Result<Operator, EngineError> {
        Ok(match preset {
            Preset::Szasz { n } => {
                KernelParams::new(n, 1.0, 0)?;
                Operator::Discrete {
                    pair: AppellPair::szasz(),
                    n,
                }
            }
            Preset::Phillips { n } => Operator::Smoothed(OperatorSpec::phillips(n)?),
            Preset::SzaszPaltanea { n, rho, c } => {
                Operator::Smoothed(OperatorSpec::szasz_paltanea(n, rho, c)?)
            }
            Preset::A2Family { a, b, n, rho, c } => {
                Operator::Smoothed(OperatorSpec::a2_family(a, b, n, rho, c)?)
            }
        })
    }

    pub fn apply(&self, f: &FunctionHandle, x: f64, opts: &EvalOptions) -> Result<f64, EngineError> {
        match self {
            Operator::Discrete { pair, n } => apply_discrete(pair, *n, f, x, opts),
            Operator::Smoothed(spec) => spec.apply(f, x, opts),
        }
    }

    pub fn pair(&self) -> &AppellPair {
        match self {
            Operator::Discrete { pair, .. } => pair,
            Operator::Smoothed(spec) => spec.pair(),
        }
    }

    pub fn n(&self) -> f64 {
        match self {
            Operator::Discrete { n, .. } => *n,
            Operator::Smoothed(spec) => spec.n(),
        }
    }
}

/// T_n(f; x) by direct summation over the sample points i/n.
pub fn apply_discrete(
    pair: &AppellPair,
    n: f64,
    f: &FunctionHandle,
    x: f64,
    opts: &EvalOptions,
) -> Result<f64, EngineError> {
    let ws = pair.weights(n, x, opts.weight_eps)?;
    let mut s = CompensatedSum::default();
    for (i, &w) in ws.weights.iter().enumerate() {
        if w > 0.0 {
            s.add(w * f.eval(i as f64 / n));
        }
    }
    Ok(s.value())
}

impl OperatorSpec {
    pub fn new(pair: AppellPair, kernel: KernelParams) -> Self {
        OperatorSpec { pair, kernel }
    }

    pub fn phillips(n: f64) -> Result<Self, EngineError> {
        Ok(Self::new(AppellPair::szasz(), KernelParams::new(n, 1.0, 0)?))
    }

    pub fn szasz_paltanea(n: f64, rho: f64, c: u32) -> Result<Self, EngineError> {
        Ok(Self::new(AppellPair::szasz(), KernelParams::new(n, rho, c)?))
    }

    pub fn a2_family(a: Vec<f64>, b: Vec<f64>, n: f64, rho: f64, c: u32) -> Result<Self, EngineError> {
        Ok(Self::new(AppellPair::new(a, b)?, KernelParams::new(n, rho, c)?))
    }

    pub fn pair(&self) -> &AppellPair {
        &self.pair
    }

    pub fn kernel(&self) -> &KernelParams {
        &self.kernel
    }

    pub fn n(&self) -> f64 {
        self.kernel.n
    }

    fn atom_weight(&self, ws: &WeightSequence, x: f64, opts: &EvalOptions) -> f64 {
        match opts.atom {
            AtomConvention::Consistent => ws.weights[0],
            AtomConvention::AsPrinted => {
                let d = self.pair.derivatives_at_one();
                let damp = (-2.0 * self.kernel.n * x).exp();
                let a0 = self.pair.a()[0];
                let b0 = self.pair.b().first().copied().unwrap_or(0.0);
                (a0 + b0 * damp) / (d.a[0] + d.b[0] * damp)
            }
        }
    }

    /// S_n(f; x) with fresh kernel quadrature per weight index.
    pub fn apply(&self, f: &FunctionHandle, x: f64, opts: &EvalOptions) -> Result<f64, EngineError> {
        let ws = self.pair.weights(self.kernel.n, x, opts.weight_eps)?;
        let wmax = ws.weights.iter().copied().fold(0.0, f64::max);
        let hints = IntegrandHints {
            breakpoints: f.breakpoints(),
            growth_order: f.growth_order(),
        };
        let mut s = CompensatedSum::default();
        s.add(self.atom_weight(&ws, x, opts) * f.eval(0.0));
        for (i, &w) in ws.weights.iter().enumerate().skip(1) {
            if w <= WEIGHT_SKIP * wmax {
                continue;
            }
            let q = self
                .kernel
                .integrate(i as u32, &|z| f.eval(z), hints, &opts.quadrature)?;
            s.add(w * q.value);
        }
        Ok(s.value())
    }

    /// S_n(zeta^r; x) through the closed kernel moments; no quadrature.
    pub fn apply_monomial(&self, r: u32, x: f64, opts: &EvalOptions) -> Result<f64, EngineError> {
        let ws = self.pair.weights(self.kernel.n, x, opts.weight_eps)?;
        let wmax = ws.weights.iter().copied().fold(0.0, f64::max);
        let mut s = CompensatedSum::default();
        if r == 0 {
            s.add(self.atom_weight(&ws, x, opts));
        }
        for (i, &w) in ws.weights.iter().enumerate().skip(1) {
            if w <= WEIGHT_SKIP * wmax {
                continue;
            }
            s.add(w * self.kernel.raw_moment(i as u32, r)?);
        }
        Ok(s.value())
    }
}

/// Evaluates one (operator, f) pair over many x: the kernel integrals do not
/// depend on x, so they are computed once (in parallel, order preserved) up
/// to the weight horizon of the largest x.
#[derive(Debug)]
pub struct GridEvaluator {
    spec: OperatorSpec,
    opts: EvalOptions,
    x_max: f64,
    f0: f64,
    /// integrals[i] = int phi_i f for i >= 1; slot 0 unused.
    integrals: Vec<f64>,
}

impl GridEvaluator {
    pub fn new(
        spec: OperatorSpec,
        f: &FunctionHandle,
        x_max: f64,
        opts: EvalOptions,
    ) -> Result<Self, EngineError> {
        let cap = spec.pair.horizon(spec.kernel.n * x_max);
        let hints = IntegrandHints {
            breakpoints: f.breakpoints(),
            growth_order: f.growth_order(),
        };
        let mut integrals = vec![0.0];
        let computed: Result<Vec<f64>, KernelError> = (1..=cap)
            .into_par_iter()
            .map(|i| {
                spec.kernel
                    .integrate(i as u32, &|z| f.eval(z), hints, &opts.quadrature)
                    .map(|q| q.value)
            })
            .collect();
        integrals.extend(computed?);
        Ok(GridEvaluator {
            spec,
            opts,
            x_max,
            f0: f.eval(0.0),
            integrals,
        })
    }

    pub fn eval(&self, x: f64) -> Result<f64, EngineError> {
        if !(x <= self.x_max) {
            return Err(EngineError::OutsideGrid {
                x,
                x_max: self.x_max,
            });
        }
        let ws = self
            .spec
            .pair
            .weights(self.spec.kernel.n, x, self.opts.weight_eps)?;
        let mut s = CompensatedSum::default();
        s.add(self.spec.atom_weight(&ws, x, &self.opts) * self.f0);
        for (i, &w) in ws.weights.iter().enumerate().skip(1) {
            if w > 0.0 {
                s.add(w * self.integrals[i]);
            }
        }
        Ok(s.value())
    }

    pub fn spec(&self) -> &OperatorSpec {
        &self.spec
    }
}
