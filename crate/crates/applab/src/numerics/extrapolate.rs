//! Richardson-style limit extraction: fit value = a + b/n on the largest-n
//! half of a sample ladder and report the fit residual as a health check.

use super::NumericsError;

/// Result of a 1/n extrapolation.
#[derive(Debug, Clone, Copy)]
pub struct LimitFit {
    /// Extrapolated value at n = inf.
    pub estimate: f64,
    /// Coefficient of 1/n.
    pub slope: f64,
    /// Max absolute deviation of the fit over the samples it used.
    pub residual: f64,
    pub samples_used: usize,
}

const RESIDUAL_REL: f64 = 1e-3;

/// Extrapolate `(n, value)` samples to n = inf assuming value = a + b/n +
/// o(1/n). Samples need not be sorted. Errors if fewer than three samples
/// are given or the residual says the model does not fit.
pub fn extrapolate_limit(samples: &[(f64, f64)]) -> Result<LimitFit, NumericsError> {
    if samples.len() < 3 {
        return Err(NumericsError::TooFewSamples {
            needed: 3,
            got: samples.len(),
        });
    }
    let mut pts = samples.to_vec();
    for &(n, v) in &pts {
        if !(n > 0.0) || !n.is_finite() || !v.is_finite() {
            return Err(NumericsError::Domain(format!(
                "extrapolation sample ({n}, {v}) is not a finite positive-n pair"
            )));
        }
    }
    pts.sort_by(|p, q| p.0.total_cmp(&q.0));
    pts.dedup_by(|p, q| p.0 == q.0);
    if pts.len() < 3 {
        return Err(NumericsError::TooFewSamples {
            needed: 3,
            got: pts.len(),
        });
    }

    let used = pts.len().div_ceil(2).max(3);
    let tail = &pts[pts.len() - used..];

    let m = tail.len() as f64;
    let mut su = 0.0;
    let mut sv = 0.0;
    for &(n, v) in tail {
        su += 1.0 / n;
        sv += v;
    }
    let (mu, mv) = (su / m, sv / m);
    let mut suu = 0.0;
    let mut suv = 0.0;
    for &(n, v) in tail {
        let du = 1.0 / n - mu;
        suu += du * du;
        suv += du * (v - mv);
    }
    if suu == 0.0 {
        return Err(NumericsError::Domain(
            "extrapolation needs distinct n values".into(),
        ));
    }
    let slope = suv / suu;
    let estimate = mv - slope * mu;

    let mut residual = 0.0_f64;
    for &(n, v) in tail {
        residual = residual.max((estimate + slope / n - v).abs());
    }
    let scale = estimate.abs().max(1.0);
    if residual > RESIDUAL_REL * scale {
        return Err(NumericsError::NoLimit { residual, scale });
    }
    Ok(LimitFit {
        estimate,
        slope,
        residual,
        samples_used: tail.len(),
    })
}
