//! Integration over [0, inf) driven by a decay hint: exponentially decaying
//! integrands go through order-doubled modified Laguerre rules, polynomially
//! decaying ones through a rational map onto (0, 1) and adaptive panels.

use super::adaptive::integrate_segments;
use super::gauss::laguerre_modified;
use super::{Accuracy, NumericsError, Quadrature};

/// How the integrand decays toward +inf.
#[derive(Debug, Clone, Copy)]
pub enum Tail {
    /// |f(x)| ~ e^{-rate x} up to polynomial factors.
    Exponential { rate: f64 },
    /// |f(x)| decays like a power of x; `scale` locates the transition
    /// region and sets the u = x / (x + scale) change of variables.
    PowerLaw { scale: f64 },
}

const BASE_ORDER: usize = 8;
const MAX_ORDER: usize = 1024;

/// Integral of `f` over [0, inf).
pub fn integrate_halfline<F: Fn(f64) -> f64>(
    f: F,
    tail: Tail,
    acc: &Accuracy,
) -> Result<Quadrature, NumericsError> {
    match tail {
        Tail::Exponential { rate } => {
            if !(rate > 0.0) || !rate.is_finite() {
                return Err(NumericsError::Domain(format!(
                    "exponential tail needs a positive rate, got {rate}"
                )));
            }
            let mut prev: Option<f64> = None;
            let mut order = BASE_ORDER;
            let mut refinements = 0;
            loop {
                let rule = laguerre_modified(order)?;
                let mut sum = 0.0;
                for (t, w) in rule.nodes.iter().zip(&rule.weights) {
                    sum += w * f(t / rate);
                }
                sum /= rate;
                if !sum.is_finite() {
                    return Err(NumericsError::Domain(
                        "integrand produced a non-finite value on the half-line".into(),
                    ));
                }
                if let Some(p) = prev {
                    let diff = (sum - p).abs();
                    if diff <= acc.abs_tol.max(acc.rel_tol * sum.abs()) {
                        return Ok(Quadrature {
                            value: sum,
                            error: diff,
                        });
                    }
                    if order >= MAX_ORDER || refinements >= acc.max_refinements {
                        return Err(NumericsError::AccuracyNotReached {
                            value: sum,
                            error: diff,
                        });
                    }
                }
                prev = Some(sum);
                order *= 2;
                refinements += 1;
            }
        }
        Tail::PowerLaw { scale } => {
            if !(scale > 0.0) || !scale.is_finite() {
                return Err(NumericsError::Domain(format!(
                    "power-law tail needs a positive scale, got {scale}"
                )));
            }
            let g = |u: f64| {
                let onemu = 1.0 - u;
                if onemu <= 0.0 {
                    return 0.0;
                }
                f(scale * u / onemu) * scale / (onemu * onemu)
            };
            let mut seeds = vec![0.0, 1.0];
            for k in 1..=9 {
                seeds.push(0.1 * k as f64);
            }
            for k in 2..=13 {
                seeds.push(10f64.powi(-k));
                seeds.push(1.0 - 10f64.powi(-k));
            }
            integrate_segments(&g, &seeds, acc, 800)
        }
    }
}
