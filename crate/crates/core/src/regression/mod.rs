//! Model fitting for the mediator system and the outcome model.
//!
//! The mediator system regresses every mediator on `(1, T, X)` by ordinary
//! least squares; since all equations share the same regressors,
//! equation-by-equation OLS is efficient and the joint coefficient
//! covariance has Kronecker structure `Σ₂ ⊗ (DᵀD)⁻¹`. The outcome model is
//! `Y ~ (1, T, M¹..M^K, X)`, fit by OLS for a continuous outcome and by
//! iteratively reweighted least squares for logit/probit outcomes.

mod glm;
mod ols;
mod sample;

pub use glm::GlmFit;
pub use ols::{fit_ols, LinearFit};
pub use sample::{sample_parameters, MediatorCoefficients, OutcomeCoefficients, ParameterDraw};

use nalgebra::{DMatrix, DVector};

use crate::dataset::{Dataset, Family};
use crate::error::{Error, Result};
use crate::linalg;

/// Fitted mediator system: intercepts, treatment slopes and covariate
/// coefficients for each of the K mediators, the K×K residual covariance,
/// and the sampling covariance of all stacked coefficients.
///
/// Stacking is mediator-major with per-equation order
/// `(intercept, treatment, covariates...)`, matching the Kronecker layout
/// of `coef_cov`.
#[derive(Debug, Clone)]
pub struct MediatorSystemFit {
    pub alpha2: DVector<f64>,
    pub beta2: DVector<f64>,
    pub xi2: DMatrix<f64>,
    pub sigma2: DMatrix<f64>,
    pub coef_cov: DMatrix<f64>,
    pub n_used: usize,
}

impl MediatorSystemFit {
    pub fn n_mediators(&self) -> usize {
        self.alpha2.len()
    }

    pub fn n_covariates(&self) -> usize {
        self.xi2.ncols()
    }

    /// Mediator-major stacked coefficient vector, the mean of the
    /// quasi-Bayesian sampling distribution.
    pub fn stacked_coefficients(&self) -> DVector<f64> {
        let k = self.n_mediators();
        let q = 2 + self.n_covariates();
        let mut out = DVector::zeros(k * q);
        for i in 0..k {
            out[i * q] = self.alpha2[i];
            out[i * q + 1] = self.beta2[i];
            for p in 0..self.n_covariates() {
                out[i * q + 2 + p] = self.xi2[(i, p)];
            }
        }
        out
    }
}

/// Fitted outcome model.
#[derive(Debug, Clone)]
pub struct OutcomeFit {
    pub alpha3: f64,
    pub beta3: f64,
    pub gamma: DVector<f64>,
    pub xi3: DVector<f64>,
    pub family: Family,
    /// Residual standard deviation for the linear family; fixed at 1 for
    /// probit (latent scale) and logit (the logistic scale semantics are
    /// carried by `family`).
    pub sigma3: f64,
    pub coef_cov: DMatrix<f64>,
    pub converged: bool,
    pub n_iter: usize,
}

impl OutcomeFit {
    pub fn n_mediators(&self) -> usize {
        self.gamma.len()
    }

    /// Coefficient vector in design order `(1, T, M¹..M^K, X)`.
    pub fn stacked_coefficients(&self) -> DVector<f64> {
        let k = self.gamma.len();
        let p = self.xi3.len();
        let mut out = DVector::zeros(2 + k + p);
        out[0] = self.alpha3;
        out[1] = self.beta3;
        for i in 0..k {
            out[2 + i] = self.gamma[i];
        }
        for i in 0..p {
            out[2 + k + i] = self.xi3[i];
        }
        out
    }
}

/// Design matrix `(1, T, X)` shared by all mediator equations.
fn mediator_design(data: &Dataset) -> DMatrix<f64> {
    let n = data.n_rows();
    let p = data.n_covariates();
    let mut design = DMatrix::zeros(n, 2 + p);
    for i in 0..n {
        design[(i, 0)] = 1.0;
        design[(i, 1)] = data.treatment()[i];
        for j in 0..p {
            design[(i, 2 + j)] = data.covariates()[(i, j)];
        }
    }
    design
}

/// Design matrix `(1, T, M¹..M^K, X)` for the outcome model.
fn outcome_design(data: &Dataset) -> DMatrix<f64> {
    let n = data.n_rows();
    let k = data.n_mediators();
    let p = data.n_covariates();
    let mut design = DMatrix::zeros(n, 2 + k + p);
    for i in 0..n {
        design[(i, 0)] = 1.0;
        design[(i, 1)] = data.treatment()[i];
        for j in 0..k {
            design[(i, 2 + j)] = data.mediators()[(i, j)];
        }
        for j in 0..p {
            design[(i, 2 + k + j)] = data.covariates()[(i, j)];
        }
    }
    design
}

/// Fits every mediator on `(1, T, X)` and assembles the residual
/// cross-covariance (divisor `n - 2 - P`) together with the Kronecker
/// coefficient covariance `Σ₂ ⊗ (DᵀD)⁻¹`.
pub fn fit_mediator_system(data: &Dataset) -> Result<MediatorSystemFit> {
    let n = data.n_rows();
    let k = data.n_mediators();
    let p = data.n_covariates();
    if n <= 2 + p + k {
        return Err(Error::InsufficientRows { n, q: 2 + p + k });
    }
    let design = mediator_design(data);
    let q = design.ncols();

    let mut fits = Vec::with_capacity(k);
    for j in 0..k {
        let response = DVector::from_column_slice(data.mediators().column(j).as_slice());
        fits.push(fit_ols(&design, &response)?);
    }

    let dof = (n - q) as f64;
    let mut sigma2 = DMatrix::zeros(k, k);
    for i in 0..k {
        for j in i..k {
            let cross = fits[i].residuals.dot(&fits[j].residuals) / dof;
            sigma2[(i, j)] = cross;
            sigma2[(j, i)] = cross;
        }
    }
    if linalg::min_symmetric_eigenvalue(&sigma2) < -1e-10 {
        return Err(Error::SingularResidualCovariance);
    }

    // All equations share the design, so cov(b̂) of equation i is
    // sigma2[i,i]·(DᵀD)⁻¹ and the cross blocks scale the same matrix.
    let xtx_inv = &fits[0].coef_cov / fits[0].residual_variance;
    let coef_cov = linalg::kronecker(&sigma2, &xtx_inv);

    let mut alpha2 = DVector::zeros(k);
    let mut beta2 = DVector::zeros(k);
    let mut xi2 = DMatrix::zeros(k, p);
    for i in 0..k {
        alpha2[i] = fits[i].coefficients[0];
        beta2[i] = fits[i].coefficients[1];
        for j in 0..p {
            xi2[(i, j)] = fits[i].coefficients[2 + j];
        }
    }

    Ok(MediatorSystemFit { alpha2, beta2, xi2, sigma2, coef_cov, n_used: n })
}

/// Fits the outcome model for the requested family.
pub fn fit_outcome(data: &Dataset, family: Family) -> Result<OutcomeFit> {
    let n = data.n_rows();
    let k = data.n_mediators();
    let p = data.n_covariates();
    let q = 2 + k + p;
    if n <= q {
        return Err(Error::InsufficientRows { n, q });
    }
    if family.is_binary() && !data.outcome_is_binary() {
        return Err(Error::invalid(format!(
            "family {family} requires a 0/1 outcome column"
        )));
    }
    let design = outcome_design(data);

    let (coefficients, coef_cov, sigma3, converged, n_iter) = match family {
        Family::Linear => {
            let fit = fit_ols(&design, data.outcome())?;
            let sigma3 = fit.residual_variance.sqrt();
            (fit.coefficients, fit.coef_cov, sigma3, true, 0)
        }
        Family::Logit | Family::Probit => {
            let fit = glm::fit_glm(&design, data.outcome(), family)?;
            (fit.coefficients, fit.coef_cov, 1.0, fit.converged, fit.n_iter)
        }
    };

    let gamma = DVector::from_iterator(k, (0..k).map(|i| coefficients[2 + i]));
    let xi3 = DVector::from_iterator(p, (0..p).map(|i| coefficients[2 + k + i]));
    Ok(OutcomeFit {
        alpha3: coefficients[0],
        beta3: coefficients[1],
        gamma,
        xi3,
        family,
        sigma3,
        coef_cov,
        converged,
        n_iter,
    })
}
