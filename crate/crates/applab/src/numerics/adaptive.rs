//! Deterministic adaptive quadrature over a chain of panels: embedded 7/15
//! Gauss-Legendre estimates, worst panel bisected first, ties broken by
//! position, final sum taken left to right with compensation.

use super::gauss::gauss_legendre;
use super::{Accuracy, CompensatedSum, NumericsError, Quadrature};

struct Panel {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

fn eval_panel<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> Result<Panel, NumericsError> {
    let low = gauss_legendre(7).expect("fixed-order rule");
    let high = gauss_legendre(15).expect("fixed-order rule");
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let len = hi - lo;

    let apply = |rule: &super::gauss::GaussRule| -> f64 {
        let mut acc = 0.0;
        for (t, w) in rule.nodes.iter().zip(&rule.weights) {
            acc += w * f(mid + half * t);
        }
        acc * len
    };

    let coarse = apply(&low);
    let fine = apply(&high);
    if !fine.is_finite() {
        return Err(NumericsError::Domain(format!(
            "integrand produced a non-finite value on [{lo:e}, {hi:e}]"
        )));
    }
    Ok(Panel {
        lo,
        hi,
        value: fine,
        error: (fine - coarse).abs(),
    })
}

/// Integrate `f` over the union of segments between consecutive `seeds`.
pub(crate) fn integrate_segments<F: Fn(f64) -> f64>(
    f: &F,
    seeds: &[f64],
    acc: &Accuracy,
    max_panels: usize,
) -> Result<Quadrature, NumericsError> {
    let mut bounds: Vec<f64> = seeds.iter().copied().filter(|s| s.is_finite()).collect();
    bounds.sort_unstable_by(f64::total_cmp);
    bounds.dedup();
    if bounds.len() < 2 {
        return Err(NumericsError::Domain(
            "adaptive quadrature needs at least two distinct boundaries".into(),
        ));
    }

    let mut panels = Vec::with_capacity(max_panels.max(bounds.len()));
    for w in bounds.windows(2) {
        if w[1] > w[0] {
            panels.push(eval_panel(f, w[0], w[1])?);
        }
    }

    loop {
        let mut sum = CompensatedSum::default();
        let mut err = 0.0;
        for p in &panels {
            sum.add(p.value);
            err += p.error;
        }
        let total = sum.value();
        let tol = acc.abs_tol.max(acc.rel_tol * total.abs());
        if err <= tol {
            panels.sort_by(|p, q| p.lo.total_cmp(&q.lo));
            let mut ordered = CompensatedSum::default();
            for p in &panels {
                ordered.add(p.value);
            }
            return Ok(Quadrature {
                value: ordered.value(),
                error: err,
            });
        }
        if panels.len() >= max_panels {
            return Err(NumericsError::AccuracyNotReached {
                value: total,
                error: err,
            });
        }

        let mut worst = 0;
        for (i, p) in panels.iter().enumerate() {
            if p.error > panels[worst].error {
                worst = i;
            }
        }
        let (lo, hi) = (panels[worst].lo, panels[worst].hi);
        let mid = 0.5 * (lo + hi);
        if !(mid > lo && mid < hi) {
            return Err(NumericsError::AccuracyNotReached {
                value: total,
                error: err,
            });
        }
        panels[worst] = eval_panel(f, lo, mid)?;
        panels.push(eval_panel(f, mid, hi)?);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smooth_integrand_on_one_panel_chain() {
        let acc = Accuracy::default();
        let got = integrate_segments(&|x: f64| x.sin(), &[0.0, 1.5, std::f64::consts::PI], &acc, 200)
            .unwrap();
        assert!((got.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn kink_is_resolved_by_bisection() {
        let acc = Accuracy {
            rel_tol: 1e-12,
            ..Accuracy::default()
        };
        // int_0^2 |x - 1| dx = 1, kink not on a seed
        let got = integrate_segments(&|x: f64| (x - 1.0).abs(), &[0.0, 2.0], &acc, 400).unwrap();
        assert!((got.value - 1.0).abs() < 1e-11, "got {}", got.value);
    }

    #[test]
    fn endpoint_singularity_with_graded_seeds() {
        // int_0^1 x^{-1/2} dx = 2
        let mut seeds = vec![0.0, 1.0];
        for k in 1..=13 {
            seeds.push(10f64.powi(-k));
        }
        let acc = Accuracy {
            rel_tol: 1e-9,
            ..Accuracy::default()
        };
        let got = integrate_segments(&|x: f64| x.sqrt().recip(), &seeds, &acc, 800).unwrap();
        assert!((got.value - 2.0).abs() < 1e-8, "got {}", got.value);
    }

    #[test]
    fn panel_budget_exhaustion_is_reported() {
        let acc = Accuracy {
            rel_tol: 1e-14,
            abs_tol: 1e-300,
            ..Accuracy::default()
        };
        let r = integrate_segments(&|x: f64| x.sqrt().recip(), &[0.0, 1.0], &acc, 8);
        assert!(matches!(r, Err(NumericsError::AccuracyNotReached { .. })));
    }
}
