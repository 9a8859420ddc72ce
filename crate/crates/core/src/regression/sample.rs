use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::dataset::Family;
use crate::error::Result;
use crate::linalg;
use crate::regression::{MediatorSystemFit, OutcomeFit};
use crate::rng::{domain, substream};

/// One sampled coefficient set for the mediator system.
#[derive(Debug, Clone)]
pub struct MediatorCoefficients {
    pub alpha2: DVector<f64>,
    pub beta2: DVector<f64>,
    pub xi2: DMatrix<f64>,
}

/// One sampled coefficient set for the outcome model.
#[derive(Debug, Clone)]
pub struct OutcomeCoefficients {
    pub alpha3: f64,
    pub beta3: f64,
    pub gamma: DVector<f64>,
    pub xi3: DVector<f64>,
}

/// One quasi-Bayesian draw of all model parameters. The residual
/// covariance Σ₂ and the outcome scale are carried fixed from the fits;
/// only the mean coefficients are resampled.
#[derive(Debug, Clone)]
pub struct ParameterDraw {
    pub mediator: MediatorCoefficients,
    pub outcome: OutcomeCoefficients,
    pub sigma2: DMatrix<f64>,
    pub sigma3: f64,
    pub family: Family,
}

impl ParameterDraw {
    /// Degenerate draw at the point estimates.
    pub fn from_point_estimates(med: &MediatorSystemFit, out: &OutcomeFit) -> Self {
        ParameterDraw {
            mediator: MediatorCoefficients {
                alpha2: med.alpha2.clone(),
                beta2: med.beta2.clone(),
                xi2: med.xi2.clone(),
            },
            outcome: OutcomeCoefficients {
                alpha3: out.alpha3,
                beta3: out.beta3,
                gamma: out.gamma.clone(),
                xi3: out.xi3.clone(),
            },
            sigma2: med.sigma2.clone(),
            sigma3: out.sigma3,
            family: out.family,
        }
    }

    pub fn n_mediators(&self) -> usize {
        self.mediator.alpha2.len()
    }
}

fn unpack_mediator(v: &DVector<f64>, k: usize, p: usize) -> MediatorCoefficients {
    let q = 2 + p;
    let mut alpha2 = DVector::zeros(k);
    let mut beta2 = DVector::zeros(k);
    let mut xi2 = DMatrix::zeros(k, p);
    for i in 0..k {
        alpha2[i] = v[i * q];
        beta2[i] = v[i * q + 1];
        for j in 0..p {
            xi2[(i, j)] = v[i * q + 2 + j];
        }
    }
    MediatorCoefficients { alpha2, beta2, xi2 }
}

fn unpack_outcome(v: &DVector<f64>, k: usize, p: usize) -> OutcomeCoefficients {
    OutcomeCoefficients {
        alpha3: v[0],
        beta3: v[1],
        gamma: DVector::from_iterator(k, (0..k).map(|i| v[2 + i])),
        xi3: DVector::from_iterator(p, (0..p).map(|i| v[2 + k + i])),
    }
}

/// Draws `n_draws` i.i.d. parameter sets from the multivariate normal
/// sampling distributions of the two fitted models. The mediator and
/// outcome blocks are drawn independently: they come from separate
/// regressions. Output is deterministic given the seed, with one
/// substream per draw so order of evaluation cannot matter.
pub fn sample_parameters(
    med: &MediatorSystemFit,
    out: &OutcomeFit,
    n_draws: usize,
    seed: u64,
) -> Result<Vec<ParameterDraw>> {
    let k = med.n_mediators();
    let p = med.n_covariates();
    let med_mean = med.stacked_coefficients();
    let out_mean = out.stacked_coefficients();
    let med_factor = linalg::psd_factor(&med.coef_cov)?;
    let out_factor = linalg::psd_factor(&out.coef_cov)?;

    let mut draws = Vec::with_capacity(n_draws);
    for d in 0..n_draws {
        let mut rng = substream(seed, &[domain::PARAMETER_DRAWS, d as u64]);
        let zm: DVector<f64> =
            DVector::from_iterator(med_mean.len(), (0..med_mean.len()).map(|_| rng.sample::<f64, _>(StandardNormal)));
        let zo: DVector<f64> =
            DVector::from_iterator(out_mean.len(), (0..out_mean.len()).map(|_| rng.sample::<f64, _>(StandardNormal)));
        let med_draw = &med_mean + &med_factor * zm;
        let out_draw = &out_mean + &out_factor * zo;
        draws.push(ParameterDraw {
            mediator: unpack_mediator(&med_draw, k, p),
            outcome: unpack_outcome(&out_draw, k, p),
            sigma2: med.sigma2.clone(),
            sigma3: out.sigma3,
            family: out.family,
        });
    }
    Ok(draws)
}
