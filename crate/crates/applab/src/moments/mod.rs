//! Moment calculus for the smoothed and discrete operators: factorial sums,
//! raw and central moments by independent routes, large-n limits, and the
//! ledger diffing the published closed forms against first-principles values.

mod discrepancy;
mod printed;

pub use discrepancy::{
    aggregate_verdicts, discrepancy_report, DiscrepancyConfig, DiscrepancyReport, FormulaVerdict,
    Verdict,
};
pub use printed::PrintedFormula;

use crate::appell::{AppellError, AppellPair};
use crate::engine::{EngineError, EvalOptions, OperatorSpec};
use crate::functions::FunctionHandle;
use crate::kernel::KernelParams;
use crate::numerics::{extrapolate_limit, CompensatedSum, LimitFit};

const BINOM: [[f64; 5]; 5] = [
    [1.0, 0.0, 0.0, 0.0, 0.0],
    [1.0, 1.0, 0.0, 0.0, 0.0],
    [1.0, 2.0, 1.0, 0.0, 0.0],
    [1.0, 3.0, 3.0, 1.0, 0.0],
    [1.0, 4.0, 6.0, 4.0, 1.0],
];

// Rising factorial y(y+1)...(y+r-1) = sum_j STIRLING1_UNSIGNED[r][j] y^j.
const STIRLING1_UNSIGNED: [[f64; 5]; 5] = [
    [1.0, 0.0, 0.0, 0.0, 0.0],
    [0.0, 1.0, 0.0, 0.0, 0.0],
    [0.0, 1.0, 1.0, 0.0, 0.0],
    [0.0, 2.0, 3.0, 1.0, 0.0],
    [0.0, 6.0, 11.0, 6.0, 1.0],
];

// Power to falling factorial: y^j = sum_k STIRLING2[j][k] y(y-1)...(y-k+1).
const STIRLING2: [[f64; 5]; 5] = [
    [1.0, 0.0, 0.0, 0.0, 0.0],
    [0.0, 1.0, 0.0, 0.0, 0.0],
    [0.0, 1.0, 1.0, 0.0, 0.0],
    [0.0, 1.0, 3.0, 1.0, 0.0],
    [0.0, 1.0, 7.0, 6.0, 1.0],
];

/// Scaled factorial sums of the basis at (n, x): entry k holds
/// e^{-nx} Σ_i i(i-1)...(i-k+1) p_i(nx).
#[derive(Debug, Clone, Copy)]
pub struct FactorialSums {
    f: [f64; 5],
}

impl FactorialSums {
    /// F[k] / e^{nx}.
    pub fn scaled(&self, k: usize) -> f64 {
        self.f[k]
    }

    /// F[k] / F[0]; the e^{nx} scale cancels.
    pub fn ratio(&self, k: usize) -> f64 {
        self.f[k] / self.f[0]
    }
}

/// Closed route: k-th derivative of the generating identity at 1, so
/// F[k]/e^{nx} = Σ_m C(k,m) (nx)^{k-m} [A^{(m)}(1) + (-1)^{k-m} B^{(m)}(1) e^{-2nx}].
pub fn factorial_sums_closed(pair: &AppellPair, n: f64, x: f64) -> FactorialSums {
    let d = pair.derivatives_at_one();
    let damp = (-2.0 * n * x).exp();
    let nx = n * x;
    let mut f = [0.0_f64; 5];
    for (k, slot) in f.iter_mut().enumerate() {
        let mut acc = CompensatedSum::default();
        for m in 0..=k {
            let sign = if (k - m) % 2 == 0 { 1.0 } else { -1.0 };
            acc.add(BINOM[k][m] * nx.powi((k - m) as i32) * (d.a[m] + sign * d.b[m] * damp));
        }
        *slot = acc.value();
    }
    FactorialSums { f }
}

/// Brute route: sums (i)_k against the normalized weight sequence until the
/// tail is below eps, then restores the F[0] scale.
pub fn factorial_sums_numeric(
    pair: &AppellPair,
    n: f64,
    x: f64,
    eps: f64,
) -> Result<FactorialSums, AppellError> {
    let ws = pair.weights(n, x, eps)?;
    let d = pair.derivatives_at_one();
    let scale = d.a[0] + d.b[0] * (-2.0 * n * x).exp();
    let mut sums: [CompensatedSum; 5] = Default::default();
    for (i, &w) in ws.weights.iter().enumerate() {
        let mut falling = w;
        sums[0].add(falling);
        for (k, sum) in sums.iter_mut().enumerate().skip(1) {
            falling *= (i + 1 - k) as f64;
            sum.add(falling);
            if falling == 0.0 {
                break;
            }
        }
    }
    let mut f = [0.0_f64; 5];
    for (slot, sum) in f.iter_mut().zip(sums.iter()) {
        *slot = scale * sum.value();
    }
    Ok(FactorialSums { f })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentRoute {
    Oracle,
    Numeric,
    Quadrature,
    Paper,
}

impl MomentRoute {
    pub fn as_str(&self) -> &'static str {
        match self {
            MomentRoute::Oracle => "oracle",
            MomentRoute::Numeric => "numeric",
            MomentRoute::Quadrature => "quadrature",
            MomentRoute::Paper => "paper",
        }
    }
}

/// Raw moments m[r] = S(ζ^r; x) for r = 0..4 with their provenance route.
#[derive(Debug, Clone, Copy)]
pub struct MomentVector {
    pub m: [f64; 5],
    pub route: MomentRoute,
}

// The kernel moment of order r at index i is the rising factorial
// (iρ)(iρ+1)...(iρ+r-1) over ∏_{m=1..r}(nρ - mc); expanding the rising
// factorial in powers of iρ and powers of i in falling factorials turns
// Σ_i w_i (iρ)^{(r)} into Stirling combinations of the factorial sums.
fn stirling_numerators(fs: &FactorialSums, rho: f64) -> [f64; 5] {
    let mut pow_sums = [0.0_f64; 5];
    for (j, slot) in pow_sums.iter_mut().enumerate() {
        let mut acc = CompensatedSum::default();
        for k in 0..=j {
            acc.add(STIRLING2[j][k] * fs.f[k]);
        }
        *slot = rho.powi(j as i32) * acc.value();
    }
    let mut nums = [0.0_f64; 5];
    for (r, slot) in nums.iter_mut().enumerate() {
        let mut acc = CompensatedSum::default();
        for j in 0..=r {
            acc.add(STIRLING1_UNSIGNED[r][j] * pow_sums[j]);
        }
        *slot = acc.value();
    }
    nums
}

fn assemble_raw(fs: &FactorialSums, k: &KernelParams, route: MomentRoute) -> MomentVector {
    let nums = stirling_numerators(fs, k.rho);
    let mut m = [1.0_f64; 5];
    let mut denom = 1.0;
    for r in 1..5 {
        denom *= k.n * k.rho - (r as u32 * k.c) as f64;
        m[r] = nums[r] / (fs.f[0] * denom);
    }
    MomentVector { m, route }
}

fn require_order_four(k: &KernelParams) -> Result<(), EngineError> {
    k.raw_moment(1, 4)?;
    Ok(())
}

/// Closed-form raw moments, quadrature-free: factorial sums from the
/// derivative table, Stirling assembly, exact kernel moment denominators.
/// m[0] is 1 by construction.
pub fn raw_moments_oracle(spec: &OperatorSpec, x: f64) -> Result<MomentVector, EngineError> {
    require_order_four(spec.kernel())?;
    let fs = factorial_sums_closed(spec.pair(), spec.kernel().n, x);
    Ok(assemble_raw(&fs, spec.kernel(), MomentRoute::Oracle))
}

/// Same assembly fed by direct series summation instead of the closed sums.
pub fn raw_moments_numeric(
    spec: &OperatorSpec,
    x: f64,
    eps: f64,
) -> Result<MomentVector, EngineError> {
    require_order_four(spec.kernel())?;
    let fs = factorial_sums_numeric(spec.pair(), spec.kernel().n, x, eps)?;
    let mut mv = assemble_raw(&fs, spec.kernel(), MomentRoute::Numeric);
    mv.route = MomentRoute::Numeric;
    Ok(mv)
}

/// Full numerical path: weight sequence times per-index kernel quadrature.
/// m[0] is measured, not assumed.
pub fn raw_moments_quadrature(
    spec: &OperatorSpec,
    x: f64,
    opts: &EvalOptions,
) -> Result<MomentVector, EngineError> {
    let mut m = [0.0_f64; 5];
    for (r, slot) in m.iter_mut().enumerate() {
        *slot = spec.apply(&FunctionHandle::monomial(r as u32), x, opts)?;
    }
    Ok(MomentVector {
        m,
        route: MomentRoute::Quadrature,
    })
}

/// Raw moments evaluated from the published closed forms, typos included.
pub fn raw_moments_paper(spec: &OperatorSpec, x: f64) -> MomentVector {
    let k = spec.kernel();
    let names = [
        PrintedFormula::Lemma22M0,
        PrintedFormula::Lemma22M1,
        PrintedFormula::Lemma22M2,
        PrintedFormula::Lemma22M3,
        PrintedFormula::Lemma22M4,
    ];
    let mut m = [0.0_f64; 5];
    for (slot, formula) in m.iter_mut().zip(names.iter()) {
        *slot = formula.evaluate(spec.pair(), k.n, x, k.rho, k.c);
    }
    MomentVector {
        m,
        route: MomentRoute::Paper,
    }
}

/// Single raw moment of the given order; exists for orders the full vector
/// cannot cover when nρ ≤ 4c.
pub fn raw_moment_oracle(spec: &OperatorSpec, x: f64, r: u32) -> Result<f64, EngineError> {
    let k = spec.kernel();
    if r == 0 {
        return Ok(1.0);
    }
    k.raw_moment(1, r)?;
    let fs = factorial_sums_closed(spec.pair(), k.n, x);
    let nums = stirling_numerators(&fs, k.rho);
    let mut denom = 1.0;
    for m in 1..=r {
        denom *= k.n * k.rho - (m * k.c) as f64;
    }
    Ok(nums[r as usize] / (fs.f[0] * denom))
}

/// Same order-by-order access for the series-summation route.
pub fn raw_moment_numeric(
    spec: &OperatorSpec,
    x: f64,
    r: u32,
    eps: f64,
) -> Result<f64, EngineError> {
    let k = spec.kernel();
    if r == 0 {
        return Ok(1.0);
    }
    k.raw_moment(1, r)?;
    let fs = factorial_sums_numeric(spec.pair(), k.n, x, eps)?;
    let nums = stirling_numerators(&fs, k.rho);
    let mut denom = 1.0;
    for m in 1..=r {
        denom *= k.n * k.rho - (m * k.c) as f64;
    }
    Ok(nums[r as usize] / (fs.f[0] * denom))
}

/// Discrete-operator raw moments t_m = Σ_k S2(m,k) F[k] / (n^m F[0]).
pub fn discrete_raw_moments(pair: &AppellPair, n: f64, x: f64) -> MomentVector {
    let fs = factorial_sums_closed(pair, n, x);
    let mut m = [1.0_f64; 5];
    for r in 1..5 {
        let mut acc = CompensatedSum::default();
        for k in 0..=r {
            acc.add(STIRLING2[r][k] * fs.f[k]);
        }
        m[r] = acc.value() / (fs.f[0] * n.powi(r as i32));
    }
    MomentVector {
        m,
        route: MomentRoute::Oracle,
    }
}

/// First, second, and fourth central moments. `mu2` is the quantity the
/// bound checks call varrho.
#[derive(Debug, Clone, Copy)]
pub struct CentralMoments {
    pub mu1: f64,
    pub mu2: f64,
    pub mu4: f64,
    /// mu4 came out below 1e-12 of m4: the binomial combination cancelled
    /// almost completely and the result carries few reliable digits.
    pub cancellation_warning: bool,
}

impl CentralMoments {
    pub fn varrho(&self) -> f64 {
        self.mu2
    }
}

/// Binomial recentering of a raw-moment vector about x, compensated.
pub fn central_from_raw(mv: &MomentVector, x: f64) -> CentralMoments {
    let m = &mv.m;
    let mu1 = m[1] - x * m[0];
    let mut s2 = CompensatedSum::default();
    s2.add(m[2]);
    s2.add(-2.0 * x * m[1]);
    s2.add(x * x * m[0]);
    let mu2 = s2.value();
    let mut s4 = CompensatedSum::default();
    s4.add(m[4]);
    s4.add(-4.0 * x * m[3]);
    s4.add(6.0 * x * x * m[2]);
    s4.add(-4.0 * x.powi(3) * m[1]);
    s4.add(x.powi(4) * m[0]);
    let mu4 = s4.value();
    CentralMoments {
        mu1,
        mu2,
        mu4,
        cancellation_warning: mu4.abs() < 1e-12 * m[4].abs(),
    }
}

/// Central moments by the chosen route.
pub fn central_moments(
    spec: &OperatorSpec,
    x: f64,
    route: MomentRoute,
) -> Result<CentralMoments, EngineError> {
    let mv = match route {
        MomentRoute::Oracle => raw_moments_oracle(spec, x)?,
        MomentRoute::Numeric => raw_moments_numeric(spec, x, 1e-13)?,
        MomentRoute::Quadrature => raw_moments_quadrature(spec, x, &EvalOptions::default())?,
        MomentRoute::Paper => raw_moments_paper(spec, x),
    };
    Ok(central_from_raw(&mv, x))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentOrder {
    One,
    Two,
    Four,
}

impl MomentOrder {
    /// Power of n that renormalizes the central moment to a finite limit.
    fn scale(&self, n: f64) -> f64 {
        match self {
            MomentOrder::One | MomentOrder::Two => n,
            MomentOrder::Four => n * n,
        }
    }

    fn pick(&self, cm: &CentralMoments) -> f64 {
        match self {
            MomentOrder::One => cm.mu1,
            MomentOrder::Two => cm.mu2,
            MomentOrder::Four => cm.mu4,
        }
    }
}

/// Ladder estimate of lim n·mu1, lim n·mu2, or lim n²·mu4 at fixed x:
/// oracle central moments along n = 2^8..2^16, then a 1/n fit.
pub fn limit_estimate(
    pair: &AppellPair,
    rho: f64,
    c: u32,
    x: f64,
    order: MomentOrder,
) -> Result<LimitFit, EngineError> {
    let mut samples = Vec::with_capacity(9);
    for j in 8..=16u32 {
        let n = f64::from(1u32 << j);
        let spec = OperatorSpec::new(pair.clone(), KernelParams::new(n, rho, c)?);
        let cm = central_from_raw(&raw_moments_oracle(&spec, x)?, x);
        samples.push((n, order.scale(n) * order.pick(&cm)));
    }
    Ok(extrapolate_limit(&samples)?)
}

/// Closed forms the ladder converges to, from the 1/n expansion of the
/// oracle moments: cx/ρ + A'(1)/A(1), x(1+ρ+cx)/ρ, and 3x²(1+ρ+cx)²/ρ².
pub fn asymptotic_moment_limit(
    pair: &AppellPair,
    rho: f64,
    c: u32,
    x: f64,
    order: MomentOrder,
) -> f64 {
    let d = pair.derivatives_at_one();
    let cf = f64::from(c);
    match order {
        MomentOrder::One => cf * x / rho + d.a[1] / d.a[0],
        MomentOrder::Two => x * (1.0 + rho + cf * x) / rho,
        MomentOrder::Four => {
            let core = 1.0 + rho + cf * x;
            3.0 * x * x * core * core / (rho * rho)
        }
    }
}
