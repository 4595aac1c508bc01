//! Grid estimators for the moduli of smoothness.
//!
//! Values are suprema over finite uniform grids, hence lower bounds of the
//! true moduli. Shift counts are floor(delta / grid_step), so with the grid
//! step held fixed every estimator is nondecreasing in its delta argument.

use crate::functions::FunctionHandle;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModulusKind {
    Omega1,
    Omega2,
    OmegaWeighted,
    OmegaDt,
}

impl ModulusKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModulusKind::Omega1 => "omega1",
            ModulusKind::Omega2 => "omega2",
            ModulusKind::OmegaWeighted => "omega_weighted",
            ModulusKind::OmegaDt => "omega_dt",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ModulusEstimate {
    pub kind: ModulusKind,
    pub delta: f64,
    pub value: f64,
    pub grid_step: f64,
    pub interval: (f64, f64),
}

/// Scan grid for the design-density modulus: x swept to x_max, shifts taken
/// in multiples of h_step.
#[derive(Debug, Clone, Copy)]
pub struct DtGrid {
    pub x_max: f64,
    pub x_step: f64,
    pub h_step: f64,
}

fn steps(span: f64, step: f64) -> usize {
    (span / step + 1e-9).floor() as usize
}

fn grid_values(f: &FunctionHandle, lo: f64, span: f64, step: f64) -> Vec<f64> {
    (0..=steps(span, step))
        .map(|k| f.eval(lo + k as f64 * step))
        .collect()
}

/// sup |f(s) - f(t)| over grid pairs in the interval with |s - t| <= delta.
pub fn modulus1(
    f: &FunctionHandle,
    delta: f64,
    interval: (f64, f64),
    grid_step: f64,
) -> ModulusEstimate {
    let (lo, hi) = interval;
    assert!(delta > 0.0 && grid_step > 0.0 && hi > lo);
    assert!(
        grid_step <= delta / 8.0 * (1.0 + 1e-12),
        "grid step {grid_step} too coarse for delta {delta}"
    );
    let vals = grid_values(f, lo, hi - lo, grid_step);
    let window = steps(delta, grid_step);
    let mut sup = 0.0_f64;
    for i in 0..vals.len() {
        for j in i + 1..=(i + window).min(vals.len() - 1) {
            sup = sup.max((vals[j] - vals[i]).abs());
        }
    }
    ModulusEstimate {
        kind: ModulusKind::Omega1,
        delta,
        value: sup,
        grid_step,
        interval,
    }
}

/// sup |f(x + 2z) - 2 f(x + z) + f(x)| over the grid, 0 < z <= h, with both
/// shifts kept inside the interval.
pub fn modulus2(
    f: &FunctionHandle,
    h: f64,
    interval: (f64, f64),
    grid_step: f64,
) -> ModulusEstimate {
    let (lo, hi) = interval;
    assert!(h > 0.0 && grid_step > 0.0);
    assert!(hi - lo >= 2.0 * h, "interval too short for the double shift");
    assert!(
        grid_step <= h / 8.0 * (1.0 + 1e-12),
        "grid step {grid_step} too coarse for h {h}"
    );
    let vals = grid_values(f, lo, hi - lo, grid_step);
    let kmax = steps(h, grid_step);
    let mut sup = 0.0_f64;
    for k in 1..=kmax {
        if 2 * k >= vals.len() {
            break;
        }
        for i in 0..vals.len() - 2 * k {
            sup = sup.max((vals[i + 2 * k] - 2.0 * vals[i + k] + vals[i]).abs());
        }
    }
    ModulusEstimate {
        kind: ModulusKind::Omega2,
        delta: h,
        value: sup,
        grid_step,
        interval,
    }
}

/// sup over x in [0, x_max], 0 < h <= delta of |f(x+h) - f(x)| / (1 + (x+h)^2).
///
/// Panics when probes past x_max still dominate the head supremum, i.e. the
/// declared window misses where the weighted difference lives.
pub fn weighted_modulus(
    f: &FunctionHandle,
    delta: f64,
    x_max: f64,
    grid_step: f64,
) -> ModulusEstimate {
    assert!(delta > 0.0 && x_max > 0.0 && grid_step > 0.0);
    assert!(
        grid_step <= delta / 8.0 * (1.0 + 1e-12),
        "grid step {grid_step} too coarse for delta {delta}"
    );
    let vals = grid_values(f, 0.0, x_max + delta, grid_step);
    let window = steps(delta, grid_step);
    let x_count = steps(x_max, grid_step).min(vals.len() - 1);
    let mut sup = 0.0_f64;
    for i in 0..=x_count {
        for k in 1..=window.min(vals.len() - 1 - i) {
            let shifted = (i + k) as f64 * grid_step;
            sup = sup.max((vals[i + k] - vals[i]).abs() / (1.0 + shifted * shifted));
        }
    }
    let tail = [1.5, 2.0, 4.0]
        .iter()
        .map(|&s| {
            let x = x_max * s;
            (f.eval(x + delta) - f.eval(x)).abs() / (1.0 + (x + delta) * (x + delta))
        })
        .fold(0.0_f64, f64::max);
    assert!(
        tail <= sup.max(1e-12) * 1.25,
        "x_max {x_max} too small: tail ratio {tail:e} vs head {sup:e}"
    );
    ModulusEstimate {
        kind: ModulusKind::OmegaWeighted,
        delta,
        value: sup,
        grid_step,
        interval: (0.0, x_max),
    }
}

/// sup |f(x + h q/2) - f(x - h q/2)| with q = (x (1 + x))^(tau/2), taken over
/// grid points with the lower argument still nonnegative and 0 < h <= t.
pub fn dt_modulus(f: &FunctionHandle, t: f64, tau: f64, grid: &DtGrid) -> ModulusEstimate {
    assert!(t > 0.0 && (0.0..=1.0).contains(&tau));
    assert!(grid.x_max > 0.0 && grid.x_step > 0.0 && grid.h_step > 0.0);
    let kmax = steps(t, grid.h_step);
    let imax = steps(grid.x_max, grid.x_step);
    let mut sup = 0.0_f64;
    for i in 0..=imax {
        let x = i as f64 * grid.x_step;
        let q = (x * (1.0 + x)).powf(0.5 * tau);
        for k in 1..=kmax {
            let half = 0.5 * k as f64 * grid.h_step * q;
            let lower = x - half;
            if lower < 0.0 {
                continue;
            }
            sup = sup.max((f.eval(x + half) - f.eval(lower)).abs());
        }
    }
    ModulusEstimate {
        kind: ModulusKind::OmegaDt,
        delta: t,
        value: sup,
        grid_step: grid.h_step,
        interval: (0.0, grid.x_max),
    }
}
