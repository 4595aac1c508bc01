//! Eigenvalues of a symmetric tridiagonal matrix by the implicit-shift QL
//! method. Only eigenvalues are needed; Gauss weights are recovered from the
//! Christoffel function instead of eigenvectors.

use super::NumericsError;

const MAX_SWEEPS: u32 = 60;

/// Eigenvalues of the matrix with diagonal `d` and off-diagonal `e`
/// (`e.len() == d.len() - 1`), sorted ascending.
pub(crate) fn tridiag_eigenvalues(
    mut d: Vec<f64>,
    mut e: Vec<f64>,
) -> Result<Vec<f64>, NumericsError> {
    let n = d.len();
    assert!(n >= 1 && e.len() == n - 1);
    e.push(0.0);

    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let scale = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * scale {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_SWEEPS {
                return Err(NumericsError::NoConvergence("tridiagonal QL iteration"));
            }

            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut underflowed = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflowed = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                f = (d[i] - g) * s + 2.0 * c * b;
                p = s * f;
                d[i + 1] = g + p;
                g = c * f - b;
            }
            if !underflowed {
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        }
    }

    d.sort_unstable_by(f64::total_cmp);
    Ok(d)
}
