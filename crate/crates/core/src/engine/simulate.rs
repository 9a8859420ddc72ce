use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg;
use crate::regression::ParameterDraw;

/// Potential mediator vectors for I simulated individuals, one row per
/// individual: `z0` holds Z(0) and `z1` holds Z(1). Both arms share the
/// same residual draw, so `z1 - z0 = β₂` row by row.
#[derive(Debug, Clone)]
pub struct PotentialMediators {
    pub z0: DMatrix<f64>,
    pub z1: DMatrix<f64>,
}

pub(crate) fn simulate_mediators_with_factor<R: Rng>(
    draw: &ParameterDraw,
    sigma2_factor: &DMatrix<f64>,
    covariate_rows: &DMatrix<f64>,
    rng: &mut R,
) -> PotentialMediators {
    let k = draw.n_mediators();
    let n = covariate_rows.nrows();
    let p = covariate_rows.ncols();
    let mut z0 = DMatrix::zeros(n, k);
    let mut z1 = DMatrix::zeros(n, k);
    let mut std_normal = vec![0.0f64; k];
    for i in 0..n {
        for z in std_normal.iter_mut() {
            *z = rng.sample(StandardNormal);
        }
        for a in 0..k {
            // Residual υ_a = (L·z)_a, drawn once and reused in both arms.
            let mut v = 0.0;
            for b in 0..=a {
                v += sigma2_factor[(a, b)] * std_normal[b];
            }
            let mut mean0 = draw.mediator.alpha2[a];
            for j in 0..p {
                mean0 += draw.mediator.xi2[(a, j)] * covariate_rows[(i, j)];
            }
            z0[(i, a)] = mean0 + v;
            z1[(i, a)] = mean0 + draw.mediator.beta2[a] + v;
        }
    }
    PotentialMediators { z0, z1 }
}

/// Simulates potential mediator values `Z(0)` and `Z(1)` for the
/// individuals described by `covariate_rows` (one row each, resampled
/// from the observed data by the caller). One residual vector
/// `υ ~ N(0, Σ₂)` per individual is reused for both treatment arms.
pub fn simulate_potential_mediators<R: Rng>(
    draw: &ParameterDraw,
    covariate_rows: &DMatrix<f64>,
    rng: &mut R,
) -> Result<PotentialMediators> {
    if covariate_rows.nrows() == 0 {
        return Err(Error::invalid("at least one simulated individual is required"));
    }
    if covariate_rows.ncols() != draw.mediator.xi2.ncols() {
        return Err(Error::invalid(format!(
            "covariate rows have {} columns, draw expects {}",
            covariate_rows.ncols(),
            draw.mediator.xi2.ncols()
        )));
    }
    let factor = linalg::psd_factor(&draw.sigma2)?;
    Ok(simulate_mediators_with_factor(draw, &factor, covariate_rows, rng))
}

/// Model-implied expected outcome per individual for treatment `t` and
/// the given mediator block: the linear predictor for the linear family,
/// its inverse-logit for logit, Φ of it for probit. No outcome noise is
/// added; effects are defined as expectations.
pub fn simulate_potential_outcomes(
    draw: &ParameterDraw,
    t: u8,
    mediators: &DMatrix<f64>,
    covariate_rows: &DMatrix<f64>,
) -> Result<DVector<f64>> {
    let n = mediators.nrows();
    let k = draw.n_mediators();
    if mediators.ncols() != k {
        return Err(Error::invalid(format!(
            "mediator block has {} columns, draw expects {k}",
            mediators.ncols()
        )));
    }
    if covariate_rows.nrows() != n || covariate_rows.ncols() != draw.outcome.xi3.len() {
        return Err(Error::invalid("covariate block does not match the mediator block"));
    }
    let base = draw.outcome.alpha3 + draw.outcome.beta3 * f64::from(t);
    let mut out = DVector::zeros(n);
    for i in 0..n {
        let mut lp = base;
        for a in 0..k {
            lp += draw.outcome.gamma[a] * mediators[(i, a)];
        }
        for j in 0..covariate_rows.ncols() {
            lp += draw.outcome.xi3[j] * covariate_rows[(i, j)];
        }
        out[i] = draw.family.mean(lp);
    }
    Ok(out)
}
