use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::dataset::Family;
use crate::error::{Error, Result};
use crate::linalg;

/// Outcome families supported by the generative models.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SimFamily {
    Linear,
    Logit,
}

impl SimFamily {
    /// Family to use when analyzing data generated by this model.
    pub fn analysis_family(self) -> Family {
        match self {
            SimFamily::Linear => Family::Linear,
            SimFamily::Logit => Family::Logit,
        }
    }
}

/// Mediator equations: `M^k(t) = a_k + b_k·t + λ_k·U + ε_k` with
/// `ε ~ N(0, Σ)` drawn jointly and the latent `U` only present when the
/// model declares one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MediatorModel {
    pub intercepts: Vec<f64>,
    pub slopes: Vec<f64>,
    /// Residual covariance Σ (given treatment and latent confounder).
    pub residual_cov: Vec<Vec<f64>>,
}

/// Latent common cause of the mediators, `U ~ N(0, 1)` with one loading
/// per mediator. When `observed` is set the extracted observed data
/// exports U as a covariate column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatentConfounder {
    pub loadings: Vec<f64>,
    #[serde(default)]
    pub observed: bool,
}

/// Outcome equation coefficients. For the linear family the outcome is
/// the linear predictor plus `N(0, noise_sd²)` noise; for logit it is a
/// Bernoulli draw of the inverse-logit predictor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeModel {
    pub family: SimFamily,
    pub intercept: f64,
    pub treatment: f64,
    pub mediators: Vec<f64>,
    #[serde(default)]
    pub covariates: Vec<f64>,
    #[serde(default = "default_noise_sd")]
    pub noise_sd: f64,
}

fn default_noise_sd() -> f64 {
    1.0
}

/// Pretreatment covariate generators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CovariateGenerator {
    Normal { mean: f64, sd: f64 },
    Bernoulli { p: f64 },
}

impl CovariateGenerator {
    pub(crate) fn sample<R: rand::Rng>(&self, rng: &mut R) -> f64 {
        match self {
            CovariateGenerator::Normal { mean, sd } => {
                mean + sd * rng.sample::<f64, _>(rand_distr::StandardNormal)
            }
            CovariateGenerator::Bernoulli { p } => f64::from(rng.random::<f64>() < *p),
        }
    }
}

/// Full generative model for the counterfactual ground-truth tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationModelSpec {
    /// P(T = 1).
    pub treatment_prob: f64,
    pub mediators: MediatorModel,
    #[serde(default)]
    pub latent: Option<LatentConfounder>,
    pub outcome: OutcomeModel,
    #[serde(default)]
    pub covariates: Vec<CovariateGenerator>,
}

impl SimulationModelSpec {
    pub fn n_mediators(&self) -> usize {
        self.mediators.intercepts.len()
    }

    pub fn n_covariates(&self) -> usize {
        self.covariates.len()
    }

    pub fn residual_cov_matrix(&self) -> DMatrix<f64> {
        let k = self.n_mediators();
        DMatrix::from_fn(k, k, |i, j| self.mediators.residual_cov[i][j])
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.n_mediators();
        if k == 0 {
            return Err(Error::invalid("model needs at least one mediator"));
        }
        if !(self.treatment_prob > 0.0 && self.treatment_prob < 1.0) {
            return Err(Error::invalid("treatment_prob must lie in (0, 1)"));
        }
        if self.mediators.slopes.len() != k {
            return Err(Error::invalid("mediator slopes must match intercepts in length"));
        }
        if self.mediators.residual_cov.len() != k
            || self.mediators.residual_cov.iter().any(|row| row.len() != k)
        {
            return Err(Error::invalid("residual_cov must be K×K"));
        }
        let sigma = self.residual_cov_matrix();
        for i in 0..k {
            for j in 0..k {
                if (sigma[(i, j)] - sigma[(j, i)]).abs() > 1e-12 {
                    return Err(Error::invalid("residual_cov must be symmetric"));
                }
            }
        }
        if linalg::min_symmetric_eigenvalue(&sigma) < -1e-10 {
            return Err(Error::invalid("residual_cov must be positive semi-definite"));
        }
        if let Some(latent) = &self.latent {
            if latent.loadings.len() != k {
                return Err(Error::invalid("latent loadings must have one entry per mediator"));
            }
        }
        if self.outcome.mediators.len() != k {
            return Err(Error::invalid("outcome mediator coefficients must have length K"));
        }
        if !self.outcome.covariates.is_empty() && self.outcome.covariates.len() != self.n_covariates() {
            return Err(Error::invalid(
                "outcome covariate coefficients must match the covariate generators",
            ));
        }
        if self.outcome.family == SimFamily::Linear && self.outcome.noise_sd < 0.0 {
            return Err(Error::invalid("noise_sd must be nonnegative"));
        }
        Ok(())
    }

    /// Total mediator covariance given treatment: the residual covariance
    /// plus the latent confounder's rank-one contribution `λλᵀ` when one
    /// is present. This is the Σ₂ an analyst of the generated data faces.
    pub fn conditional_mediator_cov(&self) -> DMatrix<f64> {
        let mut sigma = self.residual_cov_matrix();
        if let Some(latent) = &self.latent {
            let k = self.n_mediators();
            for i in 0..k {
                for j in 0..k {
                    sigma[(i, j)] += latent.loadings[i] * latent.loadings[j];
                }
            }
        }
        sigma
    }

    /// Closed-form inputs carrying this model's true coefficients. When
    /// the model has covariate generators, `covariate_rows_seed` seeds a
    /// deterministic sample of 100000 rows as the empirical covariate
    /// distribution.
    pub fn closed_form_inputs(&self, covariate_rows_seed: u64) -> Result<crate::closed_form::ClosedFormInputs> {
        use nalgebra::DVector;
        self.validate()?;
        let k = self.n_mediators();
        let c = self.n_covariates();
        let covariate_rows = if c == 0 {
            DMatrix::zeros(0, 0)
        } else {
            let mut rng = crate::rng::substream(covariate_rows_seed, &[crate::rng::domain::TABLE, 77]);
            let rows = 100_000;
            let mut m = DMatrix::zeros(rows, c);
            for i in 0..rows {
                for (j, gen) in self.covariates.iter().enumerate() {
                    m[(i, j)] = gen.sample(&mut rng);
                }
            }
            m
        };
        let xi3 = if self.outcome.covariates.is_empty() {
            DVector::zeros(c)
        } else {
            DVector::from_vec(self.outcome.covariates.clone())
        };
        let inputs = crate::closed_form::ClosedFormInputs {
            alpha2: DVector::from_vec(self.mediators.intercepts.clone()),
            beta2: DVector::from_vec(self.mediators.slopes.clone()),
            xi2: DMatrix::zeros(k, c),
            alpha3: self.outcome.intercept,
            beta3: self.outcome.treatment,
            gamma: DVector::from_vec(self.outcome.mediators.clone()),
            xi3,
            sigma2: self.conditional_mediator_cov(),
            sigma3: match self.outcome.family {
                SimFamily::Linear => self.outcome.noise_sd,
                SimFamily::Logit => 1.0,
            },
            family: self.outcome.family.analysis_family(),
            covariate_rows,
        };
        inputs.validate()?;
        Ok(inputs)
    }

    /// Copy of the model with the mediator residual correlations replaced
    /// by `rho` (variances kept), the knob the study grids turn.
    pub fn with_correlation(&self, rho: f64) -> Result<SimulationModelSpec> {
        if !(-1.0..=1.0).contains(&rho) {
            return Err(Error::invalid("correlation must lie in [-1, 1]"));
        }
        let k = self.n_mediators();
        let mut spec = self.clone();
        for i in 0..k {
            for j in 0..k {
                if i != j {
                    let scale =
                        (self.mediators.residual_cov[i][i] * self.mediators.residual_cov[j][j]).sqrt();
                    spec.mediators.residual_cov[i][j] = rho * scale;
                }
            }
        }
        spec.validate()?;
        Ok(spec)
    }
}

/// Ready-made two-mediator models used across tests, docs and the CLI
/// examples.
pub mod presets {
    use super::*;

    /// Continuous outcome; mediator means (1+4t, 2+6t), unit residual
    /// variances with correlation `rho`; outcome 1 + 10t + 5M¹ + 4M² + ε.
    pub fn continuous_two_mediator(rho: f64) -> SimulationModelSpec {
        SimulationModelSpec {
            treatment_prob: 0.3,
            mediators: MediatorModel {
                intercepts: vec![1.0, 2.0],
                slopes: vec![4.0, 6.0],
                residual_cov: vec![vec![1.0, rho], vec![rho, 1.0]],
            },
            latent: None,
            outcome: OutcomeModel {
                family: SimFamily::Linear,
                intercept: 1.0,
                treatment: 10.0,
                mediators: vec![5.0, 4.0],
                covariates: vec![],
                noise_sd: 1.0,
            },
            covariates: vec![],
        }
    }

    /// Binary (logit) outcome; mediator means (0.1+0.6t, 0.2+0.8t), unit
    /// residual variances with correlation `rho`; outcome logit
    /// -2 + 0.4t + 0.6M¹ + 0.8M². About 30% of rows are cases.
    pub fn binary_two_mediator(rho: f64) -> SimulationModelSpec {
        SimulationModelSpec {
            treatment_prob: 0.3,
            mediators: MediatorModel {
                intercepts: vec![0.1, 0.2],
                slopes: vec![0.6, 0.8],
                residual_cov: vec![vec![1.0, rho], vec![rho, 1.0]],
            },
            latent: None,
            outcome: OutcomeModel {
                family: SimFamily::Logit,
                intercept: -2.0,
                treatment: 0.4,
                mediators: vec![0.6, 0.8],
                covariates: vec![],
                noise_sd: 1.0,
            },
            covariates: vec![],
        }
    }

    /// Same structural equations as [`continuous_two_mediator`] but the
    /// mediator correlation is induced by a latent confounder with
    /// loadings (2, 3) over unit mediator noise, giving residual
    /// covariance [[5, 6], [6, 10]] (correlation ≈ 0.849) given T.
    pub fn latent_confounder_two_mediator(observed: bool) -> SimulationModelSpec {
        SimulationModelSpec {
            treatment_prob: 0.3,
            mediators: MediatorModel {
                intercepts: vec![1.0, 2.0],
                slopes: vec![4.0, 6.0],
                residual_cov: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            },
            latent: Some(LatentConfounder { loadings: vec![2.0, 3.0], observed }),
            outcome: OutcomeModel {
                family: SimFamily::Linear,
                intercept: 1.0,
                treatment: 10.0,
                mediators: vec![5.0, 4.0],
                covariates: vec![],
                noise_sd: 1.0,
            },
            covariates: vec![],
        }
    }
}
