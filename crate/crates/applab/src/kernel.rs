//! Half-line kernels attached to weight index i >= 1: for c = 0 a Gamma
//! density in zeta with shape (i rho) and rate (n rho), for c >= 1 a scaled
//! beta-prime density
//!
//! ```text
//! phi(zeta) = Gamma(n rho / c + i rho) / (Gamma(i rho) Gamma(n rho / c))
//!             c^{i rho} zeta^{i rho - 1} (1 + c zeta)^{-n rho / c - i rho}.
//! ```
//!
//! Closed raw moments come from rising-factorial products (no log-gamma
//! differences); integration runs either through order-doubled Laguerre
//! rules or adaptive panels in Beta coordinates split at zeta = 1/c, so both
//! endpoint singularities sit at a representable coordinate origin.

use thiserror::Error;

use crate::numerics::{
    integrate_segments, laguerre_gamma, lgamma, Accuracy, NumericsError, Quadrature,
};

/// Smallest exponent exp() maps to a positive normal number.
const EXP_UNDERFLOW: f64 = -745.0;

const MAX_PANELS: usize = 2400;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelParams {
    pub n: f64,
    pub rho: f64,
    pub c: u32,
}

#[derive(Debug, Error)]
pub enum KernelError {
    #[error("kernel needs finite n > 0 and rho > 0, got n = {n}, rho = {rho}")]
    BadParams { n: f64, rho: f64 },
    #[error("kernel index must be >= 1")]
    BadIndex,
    #[error("zeta must be >= 0, got {zeta}")]
    BadPoint { zeta: f64 },
    #[error("raw moment of order {order} diverges at i = {index}: needs n rho > order * c, got n rho = {nrho:e}, c = {c}")]
    DivergentMoment {
        order: u32,
        index: u32,
        nrho: f64,
        c: u32,
    },
    #[error("integral against growth order {growth} diverges: needs n rho / c > growth, got n rho = {nrho:e}, c = {c}")]
    DivergentIntegral { growth: f64, nrho: f64, c: u32 },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// What the integrator may assume about the integrand.
#[derive(Debug, Clone, Copy, Default)]
pub struct IntegrandHints<'a> {
    /// Points where the integrand is not smooth.
    pub breakpoints: &'a [f64],
    /// Smallest beta with |f(zeta)| = O(1 + zeta^beta).
    pub growth_order: f64,
}

impl KernelParams {
    pub fn new(n: f64, rho: f64, c: u32) -> Result<Self, KernelError> {
        if !(n > 0.0) || !(rho > 0.0) || !n.is_finite() || !rho.is_finite() {
            return Err(KernelError::BadParams { n, rho });
        }
        Ok(KernelParams { n, rho, c })
    }

    fn shape(&self, i: u32) -> f64 {
        f64::from(i) * self.rho
    }

    /// ln phi_i(zeta); -inf where the density vanishes.
    pub fn log_density(&self, i: u32, zeta: f64) -> Result<f64, KernelError> {
        if i == 0 {
            return Err(KernelError::BadIndex);
        }
        if !(zeta >= 0.0) {
            return Err(KernelError::BadPoint { zeta });
        }
        let irho = self.shape(i);
        let nrho = self.n * self.rho;
        if self.c == 0 {
            Ok(irho * nrho.ln() - lgamma(irho) + (irho - 1.0) * zeta.ln() - nrho * zeta)
        } else {
            let cf = f64::from(self.c);
            let q = nrho / cf;
            Ok(lgamma(q + irho) - lgamma(irho) - lgamma(q) + irho * cf.ln()
                + (irho - 1.0) * zeta.ln()
                - (q + irho) * (cf * zeta).ln_1p())
        }
    }

    /// Closed-form raw moment E[zeta^r] of the index-i kernel:
    /// prod_{j<r} (i rho + j) / prod_{j=1..r} (n rho - j c).
    pub fn raw_moment(&self, i: u32, r: u32) -> Result<f64, KernelError> {
        if i == 0 {
            return Err(KernelError::BadIndex);
        }
        if r == 0 {
            return Ok(1.0);
        }
        let irho = self.shape(i);
        let nrho = self.n * self.rho;
        let cf = f64::from(self.c);
        if self.c > 0 && nrho <= f64::from(r) * cf * (1.0 + 1e-12) {
            return Err(KernelError::DivergentMoment {
                order: r,
                index: i,
                nrho,
                c: self.c,
            });
        }
        let mut num = 1.0_f64;
        let mut den = 1.0_f64;
        for j in 0..r {
            num *= irho + f64::from(j);
            den *= nrho - f64::from(j + 1) * cf;
        }
        Ok(num / den)
    }

    /// int_0^inf phi_i(zeta) f(zeta) d zeta.
    pub fn integrate<F: Fn(f64) -> f64>(
        &self,
        i: u32,
        f: &F,
        hints: IntegrandHints<'_>,
        acc: &Accuracy,
    ) -> Result<Quadrature, KernelError> {
        if i == 0 {
            return Err(KernelError::BadIndex);
        }
        if self.c == 0 {
            self.integrate_gamma(i, f, hints, acc)
        } else {
            self.integrate_beta_prime(i, f, hints, acc)
        }
    }

    fn integrate_gamma<F: Fn(f64) -> f64>(
        &self,
        i: u32,
        f: &F,
        hints: IntegrandHints<'_>,
        acc: &Accuracy,
    ) -> Result<Quadrature, KernelError> {
        let irho = self.shape(i);
        let nrho = self.n * self.rho;
        if hints.breakpoints.is_empty() {
            let mut prev: Option<f64> = None;
            let mut order = 8usize;
            for _ in 0..=acc.max_refinements.min(7) {
                let rule = laguerre_gamma(irho - 1.0, order)?;
                let mut sum = 0.0;
                for (t, w) in rule.nodes.iter().zip(&rule.weights) {
                    if *w > 0.0 {
                        sum += w * f(t / nrho);
                    }
                }
                if !sum.is_finite() {
                    return Err(NumericsError::Domain(
                        "kernel integrand produced a non-finite value".into(),
                    )
                    .into());
                }
                if let Some(p) = prev {
                    let diff = (sum - p).abs();
                    if diff <= acc.abs_tol.max(acc.rel_tol * sum.abs()) {
                        return Ok(Quadrature {
                            value: sum,
                            error: diff,
                        });
                    }
                }
                prev = Some(sum);
                order *= 2;
            }
        }
        // kinked integrand or stalled doubling: adaptive in zeta
        let g = |zeta: f64| {
            if zeta <= 0.0 {
                return 0.0;
            }
            let ld = irho * nrho.ln() - lgamma(irho) + (irho - 1.0) * zeta.ln() - nrho * zeta;
            if ld < EXP_UNDERFLOW {
                0.0
            } else {
                ld.exp() * f(zeta)
            }
        };
        let sd = irho.sqrt() / nrho;
        let mode = (irho - 1.0).max(0.0) / nrho;
        let hi = (irho + 20.0 * irho.sqrt() + 120.0) / nrho;
        let mut seeds = vec![0.0, hi];
        let mut t = mode;
        while t < hi {
            seeds.push(t);
            t += sd;
        }
        if irho < 2.0 {
            for k in 1..=12 {
                seeds.push(sd * 10f64.powi(-k));
            }
        }
        for &b in hints.breakpoints {
            if b > 0.0 && b < hi {
                seeds.push(b);
            }
        }
        Ok(integrate_segments(&g, &seeds, acc, MAX_PANELS)?)
    }

    fn integrate_beta_prime<F: Fn(f64) -> f64>(
        &self,
        i: u32,
        f: &F,
        hints: IntegrandHints<'_>,
        acc: &Accuracy,
    ) -> Result<Quadrature, KernelError> {
        let irho = self.shape(i);
        let nrho = self.n * self.rho;
        let cf = f64::from(self.c);
        let q = nrho / cf;
        if q <= hints.growth_order {
            return Err(KernelError::DivergentIntegral {
                growth: hints.growth_order,
                nrho,
                c: self.c,
            });
        }
        let lnk = lgamma(q + irho) - lgamma(irho) - lgamma(q);

        // u = c zeta / (1 + c zeta); left half in u, right half in w = 1 - u
        let left = |u: f64| {
            if u <= 0.0 {
                return 0.0;
            }
            let e = lnk + (irho - 1.0) * u.ln() + (q - 1.0) * (-u).ln_1p();
            if e < EXP_UNDERFLOW {
                0.0
            } else {
                e.exp() * f(u / (cf * (1.0 - u)))
            }
        };
        let right = |w: f64| {
            if w <= 0.0 {
                return 0.0;
            }
            let e = lnk + (irho - 1.0) * (-w).ln_1p() + (q - 1.0) * w.ln();
            if e < EXP_UNDERFLOW {
                0.0
            } else {
                e.exp() * f((1.0 - w) / (cf * w))
            }
        };

        let mut seeds_left = graded_seeds(irho, lnk);
        let mut seeds_right = graded_seeds(q, lnk);
        for &b in hints.breakpoints {
            if b <= 0.0 {
                continue;
            }
            let w = 1.0 / (1.0 + cf * b);
            if w >= 0.5 {
                seeds_left.push(1.0 - w);
            } else {
                seeds_right.push(w);
            }
        }

        let la = integrate_segments(&left, &seeds_left, acc, MAX_PANELS)?;
        let ra = integrate_segments(&right, &seeds_right, acc, MAX_PANELS)?;
        Ok(Quadrature {
            value: la.value + ra.value,
            error: la.error + ra.error,
        })
    }
}

/// Geometric panel boundaries on (0, 1/2] for an integrand behaving like
/// K u^{shape - 1} near 0: deep enough that the skipped mass is negligible.
fn graded_seeds(shape: f64, lnk: f64) -> Vec<f64> {
    let mut ln_u0 = ((-18.0 * std::f64::consts::LN_10 - lnk + shape.ln()) / shape)
        .min(0.125f64.ln());
    ln_u0 = ln_u0.max(-644.0);
    let ratio = 4.0_f64;
    let mut seeds = vec![0.0, 0.5];
    let mut lu = ln_u0;
    while lu < -0.7 {
        seeds.push(lu.exp());
        lu += ratio.ln();
    }
    seeds
}

#[cfg(test)]
mod tests {
    use super::*;

    fn acc() -> Accuracy {
        Accuracy {
            rel_tol: 1e-11,
            abs_tol: 1e-15,
            max_refinements: 8,
        }
    }

    #[test]
    fn gamma_kernel_closed_moments() {
        let k = KernelParams::new(10.0, 1.5, 0).unwrap();
        // shape 4.5, rate 15
        let m1 = k.raw_moment(3, 1).unwrap();
        let m2 = k.raw_moment(3, 2).unwrap();
        assert!((m1 - 4.5 / 15.0).abs() < 1e-15);
        assert!((m2 - 4.5 * 5.5 / 225.0).abs() < 1e-15);
    }

    #[test]
    fn beta_prime_moment_divergence_boundary() {
        // n rho = 4, c = 2: order 1 exists, order 2 diverges
        let k = KernelParams::new(8.0, 0.5, 2).unwrap();
        assert!(k.raw_moment(4, 1).is_ok());
        assert!(matches!(
            k.raw_moment(4, 2),
            Err(KernelError::DivergentMoment { order: 2, .. })
        ));
    }

    #[test]
    fn densities_integrate_to_one() {
        for (k, i) in [
            (KernelParams::new(10.0, 1.0, 0).unwrap(), 1),
            (KernelParams::new(10.0, 1.0, 0).unwrap(), 40),
            (KernelParams::new(10.0, 1.0, 1).unwrap(), 3),
            (KernelParams::new(32.0, 0.5, 2).unwrap(), 1),
            (KernelParams::new(4.0, 2.0, 1).unwrap(), 25),
        ] {
            let got = k
                .integrate(i, &|_| 1.0, IntegrandHints::default(), &acc())
                .unwrap();
            assert!(
                (got.value - 1.0).abs() < 1e-10,
                "c = {}, i = {i}: mass {}",
                k.c,
                got.value
            );
        }
    }

    #[test]
    fn quadrature_reproduces_closed_integer_moments() {
        for (k, i) in [
            (KernelParams::new(10.0, 1.0, 0).unwrap(), 5),
            (KernelParams::new(10.0, 1.0, 1).unwrap(), 5),
            (KernelParams::new(32.0, 0.5, 2).unwrap(), 7),
        ] {
            for r in 1..=4u32 {
                let closed = k.raw_moment(i, r).unwrap();
                let hints = IntegrandHints {
                    breakpoints: &[],
                    growth_order: f64::from(r),
                };
                let quad = k
                    .integrate(i, &|z| z.powi(r as i32), hints, &acc())
                    .unwrap();
                let rel = ((quad.value - closed) / closed).abs();
                assert!(
                    rel < 1e-9,
                    "c = {}, i = {i}, r = {r}: closed {closed:e} vs quad {:e} (rel {rel:e})",
                    k.c,
                    quad.value
                );
            }
        }
    }

    #[test]
    fn fractional_moment_cross_checks_quadrature() {
        // E sqrt(zeta) has a Gamma-ratio closed form on both kernel families
        let k0 = KernelParams::new(10.0, 1.5, 0).unwrap();
        let irho = 4.5_f64;
        let nrho = 15.0_f64;
        let want0 = (lgamma(irho + 0.5) - lgamma(irho)).exp() / nrho.sqrt();
        let got0 = k0
            .integrate(
                3,
                &|z: f64| z.sqrt(),
                IntegrandHints {
                    breakpoints: &[],
                    growth_order: 0.5,
                },
                &acc(),
            )
            .unwrap();
        assert!(((got0.value - want0) / want0).abs() < 1e-10, "{} vs {want0}", got0.value);

        let k2 = KernelParams::new(32.0, 0.5, 2).unwrap();
        // i = 4: shape 2, q = 8
        let want2 =
            (lgamma(2.5) - lgamma(2.0) + lgamma(7.5) - lgamma(8.0)).exp() / 2.0_f64.sqrt();
        let got2 = k2
            .integrate(
                4,
                &|z: f64| z.sqrt(),
                IntegrandHints {
                    breakpoints: &[],
                    growth_order: 0.5,
                },
                &acc(),
            )
            .unwrap();
        assert!(((got2.value - want2) / want2).abs() < 1e-10, "{} vs {want2}", got2.value);
    }

    #[test]
    fn exponential_payoff_on_gamma_kernel() {
        // E e^{-zeta} = (rate / (rate + 1))^shape
        let k = KernelParams::new(10.0, 1.0, 0).unwrap();
        let want = (10.0_f64 / 11.0).powi(5);
        let got = k
            .integrate(5, &|z: f64| (-z).exp(), IntegrandHints::default(), &acc())
            .unwrap();
        assert!(((got.value - want) / want).abs() < 1e-11);
    }

    #[test]
    fn kinked_integrand_uses_breakpoint_seeds() {
        // E |zeta - m1| on a Gamma kernel: 2 shape^shape e^{-shape} /
        // (rate Gamma(shape)) at m1 = shape/rate
        let k = KernelParams::new(10.0, 1.0, 0).unwrap();
        let shape = 5.0_f64;
        let m1 = k.raw_moment(5, 1).unwrap();
        let want = 2.0 * (shape * shape.ln() - shape - lgamma(shape)).exp() / 10.0;
        let hints = IntegrandHints {
            breakpoints: &[m1],
            growth_order: 1.0,
        };
        let got = k.integrate(5, &|z: f64| (z - m1).abs(), hints, &acc()).unwrap();
        assert!(
            ((got.value - want) / want).abs() < 1e-10,
            "{} vs {want}",
            got.value
        );
    }

    #[test]
    fn growth_beyond_tail_index_is_rejected() {
        let k = KernelParams::new(8.0, 0.5, 2).unwrap();
        let hints = IntegrandHints {
            breakpoints: &[],
            growth_order: 2.0,
        };
        let r = k.integrate(4, &|z: f64| z * z, hints, &acc());
        assert!(matches!(r, Err(KernelError::DivergentIntegral { .. })));
    }

    #[test]
    fn huge_shape_kernel_stays_accurate() {
        // i rho = 3000 on the Gamma branch
        let k = KernelParams::new(600.0, 1.0, 0).unwrap();
        let got = k
            .integrate(3000, &|z: f64| z, IntegrandHints { breakpoints: &[], growth_order: 1.0 }, &acc())
            .unwrap();
        let want = k.raw_moment(3000, 1).unwrap();
        assert!(((got.value - want) / want).abs() < 1e-10);
    }
}
