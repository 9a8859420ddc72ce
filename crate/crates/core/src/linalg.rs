//! Small numerical helpers shared by the fitting and simulation code.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Cholesky-style factor `L` with `A = L Lᵀ` for a symmetric positive
/// *semi*-definite matrix. Unlike a strict Cholesky, zero (or numerically
/// zero) pivots are allowed and produce zero columns, so degenerate
/// covariances factor exactly instead of failing.
///
/// Returns `None` when a pivot is negative beyond `tol`, or when a zero
/// pivot leaves unexplained mass in its column (i.e. the matrix is not PSD
/// within tolerance).
pub fn psd_cholesky(a: &DMatrix<f64>, tol: f64) -> Option<DMatrix<f64>> {
    let n = a.nrows();
    debug_assert_eq!(n, a.ncols());
    let mut l = DMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if d > tol {
            let pivot = d.sqrt();
            l[(j, j)] = pivot;
            for i in (j + 1)..n {
                let mut s = a[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = s / pivot;
            }
        } else if d >= -tol {
            // Zero pivot: the rest of the column must vanish too.
            for i in (j + 1)..n {
                let mut s = a[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)];
                }
                if s.abs() > tol.max(1e-12) * 10.0 {
                    return None;
                }
            }
        } else {
            return None;
        }
    }
    Some(l)
}

/// Relative PSD tolerance used throughout: scaled by the largest diagonal
/// entry so that both tiny and large covariances are treated alike.
pub fn psd_tolerance(a: &DMatrix<f64>) -> f64 {
    let max_diag = a.diagonal().iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    1e-10 * max_diag.max(1.0)
}

/// Factor a covariance matrix, escalating diagonal jitter up to `1e-8`
/// before giving up with [`Error::CholeskyFailure`].
pub fn psd_factor(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let tol = psd_tolerance(a);
    if let Some(l) = psd_cholesky(a, tol) {
        return Ok(l);
    }
    for jitter in [1e-12, 1e-10, 1e-8] {
        let mut jittered = a.clone();
        for i in 0..a.nrows() {
            jittered[(i, i)] += jitter;
        }
        if let Some(l) = psd_cholesky(&jittered, tol) {
            return Ok(l);
        }
    }
    Err(Error::CholeskyFailure)
}

/// Smallest eigenvalue of a symmetric matrix (used for PSD checks).
pub fn min_symmetric_eigenvalue(a: &DMatrix<f64>) -> f64 {
    a.clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .fold(f64::INFINITY, |m, &v| m.min(v))
}

/// Kronecker product `A ⊗ B`.
pub fn kronecker(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    let mut out = DMatrix::zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            let scale = a[(i, j)];
            for p in 0..br {
                for q in 0..bc {
                    out[(i * br + p, j * bc + q)] = scale * b[(p, q)];
                }
            }
        }
    }
    out
}

/// Neumaier compensated accumulator. The per-draw effect averages feed
/// exact decomposition identities, so plain summation error at I ~ 1e6
/// terms would already be visible at the 1e-10 tolerance.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn total(&self) -> f64 {
        self.sum + self.compensation
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn psd_cholesky_recovers_factor() {
        let a = DMatrix::from_row_slice(2, 2, &[5.0, 6.0, 6.0, 10.0]);
        let l = psd_cholesky(&a, psd_tolerance(&a)).unwrap();
        let back = &l * l.transpose();
        assert_abs_diff_eq!(back, a, epsilon = 1e-12);
    }

    #[test]
    fn psd_cholesky_zero_matrix_is_zero_factor() {
        let a = DMatrix::zeros(3, 3);
        let l = psd_cholesky(&a, psd_tolerance(&a)).unwrap();
        assert!(l.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn psd_cholesky_semidefinite_rank_one() {
        // vvᵀ has rank one; the second pivot is exactly zero.
        let a = DMatrix::from_row_slice(2, 2, &[4.0, 2.0, 2.0, 1.0]);
        let l = psd_cholesky(&a, psd_tolerance(&a)).unwrap();
        let back = &l * l.transpose();
        assert_abs_diff_eq!(back, a, epsilon = 1e-12);
    }

    #[test]
    fn psd_cholesky_rejects_indefinite() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(psd_cholesky(&a, psd_tolerance(&a)).is_none());
        assert!(matches!(psd_factor(&a), Err(Error::CholeskyFailure)));
    }

    #[test]
    fn kronecker_layout() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let b = DMatrix::from_row_slice(2, 2, &[0.0, 5.0, 6.0, 7.0]);
        let k = kronecker(&a, &b);
        // Entry ((i,p),(j,q)) = a[i,j] * b[p,q].
        for i in 0..2 {
            for j in 0..2 {
                for p in 0..2 {
                    for q in 0..2 {
                        assert_eq!(k[(i * 2 + p, j * 2 + q)], a[(i, j)] * b[(p, q)]);
                    }
                }
            }
        }
    }

    #[test]
    fn compensated_sum_beats_naive() {
        let mut c = CompensatedSum::new();
        let mut naive = 0.0f64;
        for _ in 0..1_000_000 {
            c.add(0.1);
            naive += 0.1;
        }
        let exact = 100_000.0;
        assert!((c.total() - exact).abs() <= (naive - exact).abs());
        assert_abs_diff_eq!(c.total(), exact, epsilon = 1e-9);
    }
}
