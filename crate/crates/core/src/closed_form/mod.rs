//! Analytic effect formulas for the linear and binary outcome models.
//!
//! For the linear structural equation model the indirect effect of
//! mediator k is the coefficient product `γ_k·β₂^k` and the direct effect
//! is `β₃`, independent of the treatment arm. For binary outcomes the
//! effects are differences of the latent-noise CDF `F_U` evaluated at
//! shifted linear predictors, averaged over the covariate distribution;
//! `F_U` is the CDF of `γᵀΥ₂ + ε₃`, i.e. a normal for probit outcomes and
//! a logistic-normal convolution for logit outcomes.
//!
//! These formulas are used as cross-checks against the simulation engine
//! and against the counterfactual ground-truth tables.

pub mod quad;

use nalgebra::{DMatrix, DVector};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::dataset::Family;
use crate::error::{Error, Result};
use crate::linalg;
use crate::regression::{MediatorSystemFit, OutcomeFit};

const LOGIT_QUAD_TOL: f64 = 1e-9;
const LOGIT_QUAD_MAX_INTERVALS: usize = 2000;

/// Model parameters and an empirical covariate distribution.
#[derive(Debug, Clone)]
pub struct ClosedFormInputs {
    pub alpha2: DVector<f64>,
    pub beta2: DVector<f64>,
    pub xi2: DMatrix<f64>,
    pub alpha3: f64,
    pub beta3: f64,
    pub gamma: DVector<f64>,
    pub xi3: DVector<f64>,
    pub sigma2: DMatrix<f64>,
    pub sigma3: f64,
    pub family: Family,
    /// Observed covariate rows (empirical F_X); may have zero rows when
    /// P = 0.
    pub covariate_rows: DMatrix<f64>,
}

impl ClosedFormInputs {
    pub fn from_fits(
        med: &MediatorSystemFit,
        out: &OutcomeFit,
        covariate_rows: DMatrix<f64>,
    ) -> Result<Self> {
        let inputs = ClosedFormInputs {
            alpha2: med.alpha2.clone(),
            beta2: med.beta2.clone(),
            xi2: med.xi2.clone(),
            alpha3: out.alpha3,
            beta3: out.beta3,
            gamma: out.gamma.clone(),
            xi3: out.xi3.clone(),
            sigma2: med.sigma2.clone(),
            sigma3: out.sigma3,
            family: out.family,
            covariate_rows,
        };
        inputs.validate()?;
        Ok(inputs)
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.gamma.len();
        if self.alpha2.len() != k || self.beta2.len() != k || self.sigma2.nrows() != k {
            return Err(Error::invalid("mediator parameter dimensions disagree"));
        }
        if self.sigma2.ncols() != k {
            return Err(Error::invalid("sigma2 must be square"));
        }
        if self.xi2.nrows() != k || self.xi2.ncols() != self.xi3.len() {
            return Err(Error::invalid("covariate coefficient dimensions disagree"));
        }
        if linalg::min_symmetric_eigenvalue(&self.sigma2) < -1e-10 {
            return Err(Error::invalid("sigma2 is not positive semi-definite"));
        }
        Ok(())
    }

    fn n_mediators(&self) -> usize {
        self.gamma.len()
    }
}

/// Effects of the linear model: `δ^k = γ_k β₂^k`, `δ^Z = Σ_k δ^k`,
/// `ζ = β₃`, all independent of the treatment arm.
#[derive(Debug, Clone, PartialEq)]
pub struct LsemEffects {
    pub delta: Vec<f64>,
    pub delta_z: f64,
    pub zeta: f64,
}

pub fn lsem_effects(inputs: &ClosedFormInputs) -> Result<LsemEffects> {
    if inputs.family != Family::Linear {
        return Err(Error::invalid("lsem_effects requires the linear family"));
    }
    let delta: Vec<f64> = (0..inputs.n_mediators())
        .map(|k| inputs.gamma[k] * inputs.beta2[k])
        .collect();
    let delta_z = delta.iter().sum();
    Ok(LsemEffects { delta, delta_z, zeta: inputs.beta3 })
}

/// Latent variance contributed by the mediator residuals:
/// `ΣΣ γ_k γ_j cov(ε₂^k, ε₂^j)`.
fn gamma_quadratic_form(gamma: &DVector<f64>, sigma2: &DMatrix<f64>) -> f64 {
    (gamma.transpose() * sigma2 * gamma)[(0, 0)]
}

/// CDF of the composite latent noise for a probit outcome:
/// `Φ(z / sqrt(σ₃² + γᵀΣ₂γ))`.
pub fn f_u_probit(z: f64, gamma: &DVector<f64>, sigma2: &DMatrix<f64>, sigma3: f64) -> Result<f64> {
    let variance = sigma3 * sigma3 + gamma_quadratic_form(gamma, sigma2);
    if variance <= 0.0 {
        return Err(Error::NonPositiveScale(variance));
    }
    let normal = Normal::standard();
    Ok(normal.cdf(z / variance.sqrt()))
}

/// CDF of the composite latent noise for a logit outcome: the convolution
/// of a standard logistic with `N(0, γᵀΣ₂γ)`.
///
/// The integral `∫ Φ((z-y)/s)·e^y/(1+e^y)² dy` is computed after the
/// substitution `u = expit(y)`, which turns the logistic weight into the
/// uniform measure on (0, 1): `∫₀¹ Φ((z - logit(u))/s) du`. When `s = 0`
/// the convolution degenerates to the standard logistic CDF.
pub fn f_u_logit(z: f64, gamma: &DVector<f64>, sigma2: &DMatrix<f64>) -> Result<f64> {
    let variance = gamma_quadratic_form(gamma, sigma2);
    if variance < 0.0 {
        if variance < -1e-12 {
            return Err(Error::NonPositiveScale(variance));
        }
        return Ok(logistic_cdf(z));
    }
    let s = variance.sqrt();
    if s < 1e-9 {
        return Ok(logistic_cdf(z));
    }
    let normal = Normal::standard();
    quad::integrate(
        |u| {
            let y = (u / (1.0 - u)).ln();
            normal.cdf((z - y) / s)
        },
        0.0,
        1.0,
        LOGIT_QUAD_TOL,
        LOGIT_QUAD_MAX_INTERVALS,
    )
}

#[inline]
fn logistic_cdf(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Effects of a binary-outcome model at treatment arm `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryEffects {
    pub delta: Vec<f64>,
    pub delta_z: f64,
    pub zeta: f64,
}

/// Evaluates the F_U difference formulas for `δ^k(t)`, `δ^Z(t)` and
/// `ζ(t)`, averaging over the empirical covariate rows.
///
/// With `g_k = γ_k β₂^k` and `g = Σ_k g_k`, the linear predictors are
/// built from the base `α₃ + γᵀα₂ + (ξ₃ + ξ₂ᵀγ)ᵀx`:
/// - `δ^k(t)` toggles `g_k·1` vs `g_k·0`, holding `(β₃ + g - g_k)·t`;
/// - `δ^Z(t)` toggles `g·1` vs `g·0`, holding `β₃·t`;
/// - `ζ(t)` toggles `β₃·1` vs `β₃·0`, holding `g·t`.
pub fn binary_effects(inputs: &ClosedFormInputs, t: u8) -> Result<BinaryEffects> {
    if !inputs.family.is_binary() {
        return Err(Error::invalid("binary_effects requires a logit or probit family"));
    }
    inputs.validate()?;
    let t = f64::from(t);
    let k = inputs.n_mediators();

    let f_u = |z: f64| -> Result<f64> {
        match inputs.family {
            Family::Probit => f_u_probit(z, &inputs.gamma, &inputs.sigma2, inputs.sigma3),
            Family::Logit => f_u_logit(z, &inputs.gamma, &inputs.sigma2),
            Family::Linear => unreachable!(),
        }
    };

    let g_k: Vec<f64> = (0..k).map(|j| inputs.gamma[j] * inputs.beta2[j]).collect();
    let g: f64 = g_k.iter().sum();
    let intercept = inputs.alpha3 + inputs.gamma.dot(&inputs.alpha2);

    // Covariate contributions (ξ₃ + ξ₂ᵀγ)ᵀ x per observed row; a single
    // zero when there are no covariates.
    let shifts: Vec<f64> = if inputs.covariate_rows.nrows() == 0 || inputs.xi3.is_empty() {
        vec![0.0]
    } else {
        let combined = &inputs.xi3 + inputs.xi2.transpose() * &inputs.gamma;
        (0..inputs.covariate_rows.nrows())
            .map(|i| inputs.covariate_rows.row(i).transpose().dot(&combined))
            .collect()
    };

    let mut delta = vec![0.0; k];
    let mut delta_z = 0.0;
    let mut zeta = 0.0;
    for &shift in &shifts {
        let base = intercept + shift;
        for (j, &gj) in g_k.iter().enumerate() {
            let held = (inputs.beta3 + g - gj) * t;
            delta[j] += f_u(base + held + gj)? - f_u(base + held)?;
        }
        delta_z += f_u(base + inputs.beta3 * t + g)? - f_u(base + inputs.beta3 * t)?;
        zeta += f_u(base + inputs.beta3 + g * t)? - f_u(base + g * t)?;
    }
    let n = shifts.len() as f64;
    for d in &mut delta {
        *d /= n;
    }
    Ok(BinaryEffects { delta, delta_z: delta_z / n, zeta: zeta / n })
}
