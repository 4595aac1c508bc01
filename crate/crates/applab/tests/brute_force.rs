//! Independent brute-force oracle for the smoothed operator with Poisson
//! weights, rho = 1, c = 0: everything is assembled by literal summation of
//! Poisson mass times Gamma-kernel moment products, sharing no code with the
//! library's weight, kernel, or moment routines. The library must agree.

use applab::engine::{EvalOptions, OperatorSpec};
use applab::numerics::Accuracy;

const GRID_N: [f64; 5] = [1.0, 4.0, 16.0, 64.0, 256.0];
const GRID_X: [f64; 3] = [0.1, 1.0, 5.0];

/// Poisson(nx) masses for i = 0..=horizon, anchored in log space at
/// i = floor(nx) so nothing underflows even at nx in the thousands.
fn poisson_masses(nx: f64, horizon: usize) -> Vec<f64> {
    let anchor = (nx.floor() as usize).min(horizon);
    // ln anchor! by compensated summation of ln j
    let mut lf = 0.0_f64;
    let mut comp = 0.0_f64;
    for j in 2..=anchor {
        let term = (j as f64).ln();
        let t = lf + term;
        comp += if lf.abs() >= term { (lf - t) + term } else { (term - t) + lf };
        lf = t;
    }
    let mut mass = vec![0.0; horizon + 1];
    mass[anchor] = (-nx + anchor as f64 * nx.ln() - (lf + comp)).exp();
    for i in anchor + 1..=horizon {
        mass[i] = mass[i - 1] * nx / i as f64;
    }
    for i in (0..anchor).rev() {
        mass[i] = mass[i + 1] * (i + 1) as f64 / nx;
    }
    mass
}

/// S_n(zeta^r; x) = e^{-nx} [r = 0] + sum_{i>=1} e^{-nx}(nx)^i / i!
///                  * (i)(i+1)...(i+r-1) / n^r.
fn brute_moment(n: f64, x: f64, r: u32) -> f64 {
    let nx = n * x;
    let horizon = (nx + 40.0 * nx.sqrt() + 200.0) as usize;
    let mass = poisson_masses(nx, horizon);
    let mut sum = if r == 0 { mass[0] } else { 0.0 };
    for (i, &m) in mass.iter().enumerate().skip(1) {
        let mut mom = 1.0;
        for j in 0..u64::from(r) {
            mom *= (i as u64 + j) as f64;
        }
        sum += m * mom / n.powi(r as i32);
    }
    sum
}

fn central(n: f64, x: f64) -> (f64, f64) {
    let m: Vec<f64> = (0..=4).map(|r| brute_moment(n, x, r)).collect();
    let mu2 = m[2] - 2.0 * x * m[1] + x * x * m[0];
    let mu4 = m[4] - 4.0 * x * m[3] + 6.0 * x * x * m[2] - 4.0 * x.powi(3) * m[1]
        + x.powi(4) * m[0];
    (mu2, mu4)
}

#[test]
fn brute_force_reproduces_closed_identities() {
    for n in GRID_N {
        for x in GRID_X {
            let m0 = brute_moment(n, x, 0);
            let m1 = brute_moment(n, x, 1);
            let m2 = brute_moment(n, x, 2);
            let m3 = brute_moment(n, x, 3);
            let m4 = brute_moment(n, x, 4);
            let w2 = x * x + 2.0 * x / n;
            let w3 = x.powi(3) + 6.0 * x * x / n + 6.0 * x / (n * n);
            let w4 = x.powi(4) + 12.0 * x.powi(3) / n + 36.0 * x * x / (n * n)
                + 24.0 * x / n.powi(3);
            // anchor log magnitude ~1e4 at nx=1280 caps absolute accuracy near 1e-12
            assert!((m0 - 1.0).abs() < 1e-11, "n={n} x={x}: m0 {m0}");
            assert!((m1 - x).abs() < 1e-11 * x.max(1.0), "n={n} x={x}: m1 {m1}");
            assert!((m2 - w2).abs() < 1e-11 * w2, "n={n} x={x}: m2 {m2} vs {w2}");
            assert!((m3 - w3).abs() < 1e-11 * w3, "n={n} x={x}: m3 {m3} vs {w3}");
            assert!((m4 - w4).abs() < 1e-11 * w4, "n={n} x={x}: m4 {m4} vs {w4}");

            let (mu2, mu4) = central(n, x);
            let wmu2 = 2.0 * x / n;
            let wmu4 = 12.0 * x * x / (n * n) + 24.0 * x / n.powi(3);
            assert!(
                (mu2 - wmu2).abs() < 1e-11 * wmu2.max(1e-6),
                "n={n} x={x}: mu2 {mu2} vs {wmu2}"
            );
            assert!(
                (mu4 - wmu4).abs() < 1e-9 * wmu4.max(1e-6),
                "n={n} x={x}: mu4 {mu4} vs {wmu4}"
            );
        }
    }
}

#[test]
fn engine_moment_route_agrees_with_brute_force() {
    let opts = EvalOptions {
        weight_eps: 1e-13,
        quadrature: Accuracy::default(),
        ..EvalOptions::default()
    };
    for n in GRID_N {
        for x in GRID_X {
            let op = OperatorSpec::phillips(n).unwrap();
            for r in 0..=4u32 {
                let brute = brute_moment(n, x, r);
                let engine = op.apply_monomial(r, x, &opts).unwrap();
                let scale = brute.abs().max(1.0);
                assert!(
                    (engine - brute).abs() < 1e-11 * scale,
                    "n={n} x={x} r={r}: engine {engine:.17e} vs brute {brute:.17e}"
                );
            }
        }
    }
}
