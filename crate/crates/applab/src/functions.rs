//! Functions the operators act on, carried together with the metadata the
//! integrators need: a polynomial growth envelope |f(z)| <= scale (1 + z^order)
//! and the points where f is not smooth.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum FunctionError {
    #[error("piecewise polynomial needs at least one piece")]
    Empty,
    #[error("piece starts must be strictly increasing and finite")]
    BadBreakpoints,
    #[error("piece degree {0} exceeds the supported maximum of 4")]
    DegreeTooHigh(usize),
}

/// A function of one variable plus integration metadata.
#[derive(Clone)]
pub struct FunctionHandle {
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    name: String,
    growth_order: f64,
    growth_scale: f64,
    breakpoints: Vec<f64>,
}

impl fmt::Debug for FunctionHandle {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        fm.debug_struct("FunctionHandle")
            .field("name", &self.name)
            .field("growth_order", &self.growth_order)
            .field("growth_scale", &self.growth_scale)
            .field("breakpoints", &self.breakpoints)
            .finish()
    }
}

impl FunctionHandle {
    pub fn new(
        name: impl Into<String>,
        growth_order: f64,
        growth_scale: f64,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        FunctionHandle {
            f: Arc::new(f),
            name: name.into(),
            growth_order,
            growth_scale,
            breakpoints: Vec::new(),
        }
    }

    pub fn with_breakpoints(mut self, breakpoints: Vec<f64>) -> Self {
        self.breakpoints = breakpoints;
        self
    }

    #[inline]
    pub fn eval(&self, z: f64) -> f64 {
        (self.f)(z)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn growth_order(&self) -> f64 {
        self.growth_order
    }

    pub fn growth_scale(&self) -> f64 {
        self.growth_scale
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn one() -> Self {
        Self::new("one", 0.0, 1.0, |_| 1.0)
    }

    pub fn identity() -> Self {
        Self::new("identity", 1.0, 1.0, |z| z)
    }

    /// z^r.
    pub fn monomial(r: u32) -> Self {
        Self::new(format!("monomial_{r}"), f64::from(r), 1.0, move |z| {
            z.powi(r as i32)
        })
    }

    /// e^{-z}.
    pub fn exp_neg() -> Self {
        Self::new("exp_neg", 0.0, 1.0, |z| (-z).exp())
    }

    /// |z - center|.
    pub fn abs_dev(center: f64) -> Self {
        Self::new(
            format!("abs_dev_{center}"),
            1.0,
            1.0 + center.abs(),
            move |z| (z - center).abs(),
        )
        .with_breakpoints(vec![center])
    }

    pub fn sqrt() -> Self {
        Self::new("sqrt", 1.0, 1.0, |z| z.sqrt())
    }

    pub fn sin() -> Self {
        Self::new("sin", 0.0, 1.0, |z| z.sin())
    }

    /// z / (1 + z), bounded on the half-line.
    pub fn bounded_ratio() -> Self {
        Self::new("bounded_ratio", 0.0, 1.0, |z| z / (1.0 + z))
    }

    pub fn piecewise(poly: PiecewisePoly) -> Self {
        let order = poly.degree() as f64;
        let scale = poly.coefficient_scale();
        let breakpoints = poly.interior_breakpoints();
        let name = format!("piecewise_deg{}", poly.degree());
        Self::new(name, order, scale, move |z| poly.eval(z)).with_breakpoints(breakpoints)
    }
}

/// Piecewise polynomial on [start, inf) with pieces of degree <= 4; the last
/// piece extends to infinity. Coefficients are stored lowest power first.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewisePoly {
    pieces: Vec<(f64, Vec<f64>)>,
}

fn poly_eval(coeffs: &[f64], z: f64) -> f64 {
    let mut v = 0.0;
    for &c in coeffs.iter().rev() {
        v = v * z + c;
    }
    v
}

fn poly_derivative(coeffs: &[f64]) -> Vec<f64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &c)| k as f64 * c)
        .collect()
}

/// Real roots of a polynomial of degree <= 2 inside (lo, hi).
fn quadratic_roots_within(coeffs: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let c0 = coeffs.first().copied().unwrap_or(0.0);
    let c1 = coeffs.get(1).copied().unwrap_or(0.0);
    let c2 = coeffs.get(2).copied().unwrap_or(0.0);
    let mut roots = Vec::new();
    if c2 == 0.0 {
        if c1 != 0.0 {
            roots.push(-c0 / c1);
        }
    } else {
        let disc = c1 * c1 - 4.0 * c2 * c0;
        if disc >= 0.0 {
            let sd = disc.sqrt();
            // numerically stable pair
            let q = -0.5 * (c1 + sd.copysign(if c1 == 0.0 { 1.0 } else { c1 }));
            if q != 0.0 {
                roots.push(q / c2);
                roots.push(c0 / q);
            } else {
                roots.push(-0.5 * c1 / c2);
            }
        }
    }
    roots.retain(|r| *r > lo && *r < hi);
    roots.sort_unstable_by(f64::total_cmp);
    roots.dedup();
    roots
}

impl PiecewisePoly {
    pub fn new(pieces: Vec<(f64, Vec<f64>)>) -> Result<Self, FunctionError> {
        if pieces.is_empty() {
            return Err(FunctionError::Empty);
        }
        for w in pieces.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(FunctionError::BadBreakpoints);
            }
        }
        if pieces.iter().any(|(s, _)| !s.is_finite()) {
            return Err(FunctionError::BadBreakpoints);
        }
        for (_, c) in &pieces {
            if c.len() > 5 {
                return Err(FunctionError::DegreeTooHigh(c.len() - 1));
            }
        }
        Ok(PiecewisePoly { pieces })
    }

    /// Single global polynomial.
    pub fn global(coeffs: Vec<f64>) -> Result<Self, FunctionError> {
        Self::new(vec![(0.0, coeffs)])
    }

    pub fn degree(&self) -> usize {
        self.pieces
            .iter()
            .map(|(_, c)| c.len().saturating_sub(1))
            .max()
            .unwrap_or(0)
    }

    fn coefficient_scale(&self) -> f64 {
        self.pieces
            .iter()
            .flat_map(|(_, c)| c.iter())
            .fold(1.0_f64, |m, &c| m.max(c.abs()))
    }

    pub fn interior_breakpoints(&self) -> Vec<f64> {
        self.pieces.iter().skip(1).map(|(s, _)| *s).collect()
    }

    fn piece_index(&self, z: f64) -> usize {
        match self
            .pieces
            .binary_search_by(|(s, _)| s.total_cmp(&z))
        {
            Ok(k) => k,
            Err(0) => 0,
            Err(k) => k - 1,
        }
    }

    /// Value at z, taking the right-continuous convention at piece starts.
    pub fn eval(&self, z: f64) -> f64 {
        let (_, coeffs) = &self.pieces[self.piece_index(z)];
        poly_eval(coeffs, z)
    }

    /// Limit from the left at z.
    pub fn limit_left(&self, z: f64) -> f64 {
        let k = self.piece_index(z);
        if k > 0 && self.pieces[k].0 == z {
            poly_eval(&self.pieces[k - 1].1, z)
        } else {
            poly_eval(&self.pieces[k].1, z)
        }
    }

    /// Limit from the right at z (equals eval by convention).
    pub fn limit_right(&self, z: f64) -> f64 {
        self.eval(z)
    }

    pub fn derivative(&self) -> PiecewisePoly {
        PiecewisePoly {
            pieces: self
                .pieces
                .iter()
                .map(|(s, c)| (*s, poly_derivative(c)))
                .collect(),
        }
    }

    /// Exact total variation over (lo, hi), endpoint values taken as the
    /// one-sided limits into the interval; interior jumps are counted.
    /// Pieces must have degree <= 3 so extrema solve in closed form.
    pub fn total_variation(&self, lo: f64, hi: f64) -> f64 {
        assert!(hi >= lo, "total_variation needs hi >= lo");
        assert!(
            self.degree() <= 3,
            "total variation supports pieces of degree <= 3"
        );
        if hi == lo {
            return 0.0;
        }
        // walk pieces overlapping (lo, hi)
        let mut tv = 0.0;
        let mut prev_val: Option<f64> = None;
        let first = self.piece_index(lo);
        for (k, (start, coeffs)) in self.pieces.iter().enumerate().skip(first) {
            if *start >= hi {
                break;
            }
            let seg_lo = if k <= first { lo } else { *start };
            let seg_hi = match self.pieces.get(k + 1) {
                Some((next, _)) if *next < hi => *next,
                _ => hi,
            };
            if seg_hi <= seg_lo {
                continue;
            }
            let entry = poly_eval(coeffs, seg_lo);
            if let Some(pv) = prev_val {
                tv += (entry - pv).abs();
            }
            let dc = poly_derivative(coeffs);
            let mut stops = quadratic_roots_within(&dc, seg_lo, seg_hi);
            stops.push(seg_hi);
            let mut cur = entry;
            for s in stops {
                let v = poly_eval(coeffs, s);
                tv += (v - cur).abs();
                cur = v;
            }
            prev_val = Some(cur);
        }
        tv
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn handle_metadata_round_trip() {
        let f = FunctionHandle::abs_dev(2.0);
        assert_eq!(f.breakpoints(), &[2.0]);
        assert_eq!(f.eval(5.0), 3.0);
        assert_eq!(f.growth_order(), 1.0);
    }

    #[test]
    fn piecewise_eval_and_limits() {
        // f = z on [0,1), 2 - z^2 on [1, inf)
        let p = PiecewisePoly::new(vec![(0.0, vec![0.0, 1.0]), (1.0, vec![2.0, 0.0, -1.0])])
            .unwrap();
        assert_eq!(p.eval(0.5), 0.5);
        assert_eq!(p.eval(1.0), 1.0);
        assert_eq!(p.eval(2.0), -2.0);
        assert_eq!(p.limit_left(1.0), 1.0);
        assert_eq!(p.limit_right(1.0), 1.0);
        assert_eq!(p.derivative().eval(2.0), -4.0);
        assert_eq!(p.derivative().limit_left(1.0), 1.0);
    }

    #[test]
    fn total_variation_of_smooth_hump() {
        // z (2 - z) on [0, 2]: rises 0 -> 1, falls 1 -> 0
        let p = PiecewisePoly::global(vec![0.0, 2.0, -1.0]).unwrap();
        assert!((p.total_variation(0.0, 2.0) - 2.0).abs() < 1e-14);
        assert!((p.total_variation(0.0, 1.0) - 1.0).abs() < 1e-14);
        assert!((p.total_variation(0.5, 1.5) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn total_variation_counts_jumps_but_not_endpoint_values() {
        // 0 on [0, 1), 3 on [1, inf): jump of 3 at the breakpoint
        let p = PiecewisePoly::new(vec![(0.0, vec![0.0]), (1.0, vec![3.0])]).unwrap();
        assert!((p.total_variation(0.0, 2.0) - 3.0).abs() < 1e-14);
        // interval ending exactly at the jump sees only the left limit
        assert!(p.total_variation(0.0, 1.0).abs() < 1e-14);
        // interval starting at the jump uses the right limit
        assert!(p.total_variation(1.0, 2.0).abs() < 1e-14);
    }

    #[test]
    fn total_variation_cubic_with_two_extrema() {
        // z^3 - 3z on [-2, 2]: extrema at -1 (value 2) and 1 (value -2)
        let p = PiecewisePoly::new(vec![(-2.0, vec![0.0, -3.0, 0.0, 1.0])]).unwrap();
        // -2 -> 2 rises 4, 2 -> -2 falls 4, -2 -> 2 rises 4
        assert!((p.total_variation(-2.0, 2.0) - 12.0).abs() < 1e-13);
    }

    #[test]
    fn degree_cap_is_enforced() {
        assert!(PiecewisePoly::global(vec![0.0; 6]).is_err());
        assert!(PiecewisePoly::global(vec![1.0, 0.0, 0.0, 0.0, 2.0]).is_ok());
    }
}
