use nalgebra::{Cholesky, DMatrix, DVector};

use crate::error::{Error, Result};

/// Ordinary least squares fit of one equation.
#[derive(Debug, Clone)]
pub struct LinearFit {
    pub coefficients: DVector<f64>,
    /// `residual_variance · (XᵀX)⁻¹`.
    pub coef_cov: DMatrix<f64>,
    /// `RSS / (n - q)`.
    pub residual_variance: f64,
    pub residuals: DVector<f64>,
}

/// Rank check on the normal equations via diagonally pivoted Cholesky.
/// Returns the original index of the first column whose pivot falls below
/// tolerance, i.e. a column that is (numerically) linearly dependent on
/// the ones already accepted.
fn rank_check(xtx: &DMatrix<f64>) -> std::result::Result<(), usize> {
    let q = xtx.nrows();
    let mut a = xtx.clone();
    let mut perm: Vec<usize> = (0..q).collect();
    let max_diag = a.diagonal().iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    let tol = 1e-10 * max_diag.max(f64::MIN_POSITIVE);
    for j in 0..q {
        let mut pivot = j;
        for i in (j + 1)..q {
            if a[(i, i)] > a[(pivot, pivot)] {
                pivot = i;
            }
        }
        if a[(pivot, pivot)] <= tol {
            return Err(perm[pivot]);
        }
        if pivot != j {
            a.swap_rows(j, pivot);
            a.swap_columns(j, pivot);
            perm.swap(j, pivot);
        }
        let d = a[(j, j)].sqrt();
        for i in (j + 1)..q {
            a[(i, j)] /= d;
        }
        for i in (j + 1)..q {
            for k in (j + 1)..=i {
                let update = a[(i, j)] * a[(k, j)];
                a[(i, k)] -= update;
                a[(k, i)] = a[(i, k)];
            }
        }
    }
    Ok(())
}

/// OLS on a design matrix that already contains its intercept column.
///
/// Solves the normal equations after a pivoted rank check, so both the
/// coefficients and `(XᵀX)⁻¹` come from the same Cholesky factor.
pub fn fit_ols(design: &DMatrix<f64>, response: &DVector<f64>) -> Result<LinearFit> {
    let n = design.nrows();
    let q = design.ncols();
    if n <= q {
        return Err(Error::InsufficientRows { n, q });
    }
    if response.len() != n {
        return Err(Error::invalid(format!(
            "response has {} rows, design has {n}",
            response.len()
        )));
    }

    let xtx = design.transpose() * design;
    rank_check(&xtx).map_err(Error::RankDeficient)?;
    let chol = Cholesky::new(xtx).ok_or(Error::CholeskyFailure)?;

    let xty = design.transpose() * response;
    let coefficients = chol.solve(&xty);
    let residuals = response - design * &coefficients;
    let rss = residuals.dot(&residuals);
    let residual_variance = rss / (n - q) as f64;
    let coef_cov = chol.inverse() * residual_variance;

    Ok(LinearFit { coefficients, coef_cov, residual_variance, residuals })
}
