//! Gauss rules from Jacobi matrices. Nodes are tridiagonal eigenvalues;
//! weights come from the Christoffel function evaluated in rescaled
//! arithmetic and kept in log space, so rules for Gamma densities with shape
//! parameters in the thousands never overflow a Gamma prefactor.

use std::collections::HashMap;
use std::f64::consts::LN_10;
use std::sync::{Arc, Mutex, OnceLock};

use super::eigen::tridiag_eigenvalues;
use super::NumericsError;

/// Quadrature rule for a probability measure: `weights` sum to 1 (they may
/// underflow to zero far in a tail; `log_weights` never do).
pub(crate) struct GaussRule {
    pub nodes: Vec<f64>,
    pub log_weights: Vec<f64>,
    pub weights: Vec<f64>,
}

/// log of the Christoffel function 1 / sum_j q_j(t)^2 for the orthonormal
/// polynomials of the recurrence (a, b); this is the Gauss weight when t is
/// a node. Running values are rescaled so the sum never overflows.
fn christoffel_log(t: f64, a: &[f64], b: &[f64]) -> f64 {
    let n = a.len();
    let mut prev = 0.0_f64;
    let mut cur = 1.0_f64;
    let mut ssum = 1.0_f64;
    let mut log_scale = 0.0_f64;
    for j in 0..n - 1 {
        let carry = if j == 0 { 0.0 } else { b[j] * prev };
        let next = ((t - a[j]) * cur - carry) / b[j + 1];
        prev = cur;
        cur = next;
        ssum += cur * cur;
        if cur.abs() > 1e130 || ssum > 1e260 {
            prev *= 1e-130;
            cur *= 1e-130;
            ssum *= 1e-260;
            log_scale += 130.0 * LN_10;
        }
    }
    -(ssum.ln() + 2.0 * log_scale)
}

fn rule_from_recurrence(a: Vec<f64>, b: Vec<f64>) -> Result<GaussRule, NumericsError> {
    let nodes = tridiag_eigenvalues(a.clone(), b[1..].to_vec())?;
    let log_weights: Vec<f64> = nodes.iter().map(|&t| christoffel_log(t, &a, &b)).collect();
    let weights = log_weights.iter().map(|&lw| lw.exp()).collect();
    Ok(GaussRule {
        nodes,
        log_weights,
        weights,
    })
}

/// Rule for the normalized Gamma density t^alpha e^-t / Gamma(alpha + 1).
pub(crate) fn laguerre_gamma(alpha: f64, order: usize) -> Result<GaussRule, NumericsError> {
    if !(alpha > -1.0) || order == 0 {
        return Err(NumericsError::Domain(format!(
            "Laguerre rule needs alpha > -1 and order >= 1, got alpha = {alpha}, order = {order}"
        )));
    }
    let a = (0..order).map(|j| 2.0 * j as f64 + alpha + 1.0).collect();
    let b = (0..order)
        .map(|j| (j as f64 * (j as f64 + alpha)).sqrt())
        .collect();
    rule_from_recurrence(a, b)
}

/// alpha = 0 Laguerre rule with e^{t_k} folded into the weights, so it
/// integrates plain integrands over the half-line:
/// int_0^inf g = sum_k weights[k] g(nodes[k]).
pub(crate) fn laguerre_modified(order: usize) -> Result<Arc<GaussRule>, NumericsError> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussRule>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(rule) = cache.lock().unwrap().get(&order) {
        return Ok(Arc::clone(rule));
    }
    let mut rule = laguerre_gamma(0.0, order)?;
    rule.weights = rule
        .log_weights
        .iter()
        .zip(&rule.nodes)
        .map(|(&lw, &t)| (lw + t).exp())
        .collect();
    let rule = Arc::new(rule);
    cache
        .lock()
        .unwrap()
        .entry(order)
        .or_insert_with(|| Arc::clone(&rule));
    Ok(rule)
}

/// Rule for the normalized measure dt/2 on [-1, 1]; weights sum to 1.
pub(crate) fn gauss_legendre(order: usize) -> Result<Arc<GaussRule>, NumericsError> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussRule>>>> = OnceLock::new();
    if order == 0 {
        return Err(NumericsError::Domain("Legendre order must be >= 1".into()));
    }
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(rule) = cache.lock().unwrap().get(&order) {
        return Ok(Arc::clone(rule));
    }
    let a = vec![0.0; order];
    let b = (0..order)
        .map(|j| {
            let j = j as f64;
            j / (4.0 * j * j - 1.0).sqrt()
        })
        .collect();
    let rule = Arc::new(rule_from_recurrence(a, b)?);
    cache
        .lock()
        .unwrap()
        .entry(order)
        .or_insert_with(|| Arc::clone(&rule));
    Ok(rule)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_moments() {
        let rule = gauss_legendre(7).unwrap();
        let s0: f64 = rule.weights.iter().sum();
        let s2: f64 = rule
            .weights
            .iter()
            .zip(&rule.nodes)
            .map(|(w, t)| w * t * t)
            .sum();
        // order 7 is exact through degree 13
        let s12: f64 = rule
            .weights
            .iter()
            .zip(&rule.nodes)
            .map(|(w, t)| w * t.powi(12))
            .sum();
        assert!((s0 - 1.0).abs() < 1e-14);
        assert!((s2 - 1.0 / 3.0).abs() < 1e-14);
        assert!((s12 - 1.0 / 13.0).abs() < 1e-14);
    }

    #[test]
    fn laguerre_gamma_moments_small_alpha() {
        let rule = laguerre_gamma(4.5, 40).unwrap();
        let mean: f64 = rule
            .weights
            .iter()
            .zip(&rule.nodes)
            .map(|(w, t)| w * t)
            .sum();
        let m2: f64 = rule
            .weights
            .iter()
            .zip(&rule.nodes)
            .map(|(w, t)| w * t * t)
            .sum();
        assert!((mean - 5.5).abs() < 1e-12);
        assert!((m2 - 35.75).abs() < 1e-11);
    }

    #[test]
    fn laguerre_gamma_survives_huge_shape() {
        let alpha = 9999.0;
        let rule = laguerre_gamma(alpha, 64).unwrap();
        let s0: f64 = rule.weights.iter().sum();
        let mean: f64 = rule
            .weights
            .iter()
            .zip(&rule.nodes)
            .map(|(w, t)| w * t)
            .sum();
        assert!((s0 - 1.0).abs() < 1e-12, "mass {s0}");
        assert!((mean / (alpha + 1.0) - 1.0).abs() < 1e-12, "mean {mean}");
        assert!(rule.log_weights.iter().all(|lw| lw.is_finite()));
    }

    #[test]
    fn modified_rule_integrates_decaying_exponential() {
        let rule = laguerre_modified(48).unwrap();
        let got: f64 = rule
            .weights
            .iter()
            .zip(&rule.nodes)
            .map(|(w, t)| w * (-2.0 * t).exp())
            .sum();
        assert!((got - 0.5).abs() < 1e-12, "got {got}");
    }
}
