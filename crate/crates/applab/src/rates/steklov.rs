//! Triangular-kernel smoothing of a function on an interval, with secant
//! lines extending it one window past each end.

use crate::functions::FunctionHandle;
use crate::numerics::gauss_legendre;

/// f_h(x) = (1/h) int_{-h}^{h} (1 - |z|/h) F(x + z) dz, where F agrees with f
/// on [lo, hi] and continues past each end along the secant through the
/// endpoint and the point one h inside.
#[derive(Clone)]
pub struct SteklovMean {
    f: FunctionHandle,
    h: f64,
    lo: f64,
    hi: f64,
    left_slope: f64,
    right_slope: f64,
}

pub fn steklov_mean(f: &FunctionHandle, h: f64, interval: (f64, f64)) -> SteklovMean {
    let (lo, hi) = interval;
    assert!(h > 0.0, "h must be positive");
    assert!(hi - lo > h, "interval must be wider than h");
    SteklovMean {
        f: f.clone(),
        h,
        lo,
        hi,
        left_slope: (f.eval(lo + h) - f.eval(lo)) / h,
        right_slope: (f.eval(hi) - f.eval(hi - h)) / h,
    }
}

impl SteklovMean {
    pub fn h(&self) -> f64 {
        self.h
    }

    fn extended(&self, z: f64) -> f64 {
        if z < self.lo {
            self.f.eval(self.lo) + self.left_slope * (z - self.lo)
        } else if z > self.hi {
            self.f.eval(self.hi) + self.right_slope * (z - self.hi)
        } else {
            self.f.eval(z)
        }
    }

    /// Smoothed value at x; panels split at the kernel kink, the extension
    /// joints, and the breakpoints of f, so piecewise-polynomial inputs
    /// integrate exactly.
    pub fn eval(&self, x: f64) -> f64 {
        let h = self.h;
        let mut cuts = vec![x - h, x, x + h];
        for &b in [self.lo, self.hi]
            .iter()
            .chain(self.f.breakpoints().iter())
        {
            if b > x - h && b < x + h {
                cuts.push(b);
            }
        }
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let rule = gauss_legendre(12).expect("fixed-order rule");
        let mut acc = 0.0;
        for w in cuts.windows(2) {
            let (p, q) = (w[0], w[1]);
            if q <= p {
                continue;
            }
            let mid = 0.5 * (p + q);
            let half = 0.5 * (q - p);
            let mut seg = 0.0;
            for (&t, &wk) in rule.nodes.iter().zip(&rule.weights) {
                let z = mid + half * t;
                seg += wk * (1.0 - (z - x).abs() / h) * self.extended(z);
            }
            acc += (q - p) * seg;
        }
        acc / h
    }

    /// f_h''(x) = (F(x - h) - 2 F(x) + F(x + h)) / h^2, exact for the
    /// triangular kernel.
    pub fn second_derivative(&self, x: f64) -> f64 {
        (self.extended(x - self.h) - 2.0 * self.extended(x) + self.extended(x + self.h))
            / (self.h * self.h)
    }

    /// Wraps the smoothed function for operator application; arguments are
    /// clamped to the base interval.
    pub fn handle(&self) -> FunctionHandle {
        let this = self.clone();
        let (lo, hi) = (self.lo, self.hi);
        FunctionHandle::new(
            format!("steklov_{}", self.f.name()),
            self.f.growth_order(),
            2.0 * self.f.growth_scale(),
            move |z| this.eval(z.clamp(lo, hi)),
        )
    }
}
