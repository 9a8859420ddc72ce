use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Conditional distribution assumed for the outcome model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// Continuous outcome, Gaussian errors.
    Linear,
    /// Binary outcome, logistic latent errors.
    Logit,
    /// Binary outcome, standard normal latent errors.
    Probit,
}

impl Family {
    pub fn is_binary(self) -> bool {
        !matches!(self, Family::Linear)
    }

    /// Inverse link: the model-implied expected outcome at linear
    /// predictor `eta`.
    pub fn mean(self, eta: f64) -> f64 {
        match self {
            Family::Linear => eta,
            Family::Logit => expit(eta),
            Family::Probit => {
                use statrs::distribution::ContinuousCDF;
                statrs::distribution::Normal::standard().cdf(eta)
            }
        }
    }
}

/// Numerically stable inverse logit.
#[inline]
pub(crate) fn expit(eta: f64) -> f64 {
    if eta >= 0.0 {
        1.0 / (1.0 + (-eta).exp())
    } else {
        let e = eta.exp();
        e / (1.0 + e)
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Family::Linear => "linear",
            Family::Logit => "logit",
            Family::Probit => "probit",
        };
        f.write_str(s)
    }
}

/// Observed rectangular data: a binary treatment, `K >= 1` continuous
/// mediator columns, an outcome column and `P >= 0` covariate columns.
///
/// Construction validates the invariants once; the field accessors below
/// can then assume them.
#[derive(Debug, Clone)]
pub struct Dataset {
    treatment: Vec<f64>,
    mediators: DMatrix<f64>,
    outcome: DVector<f64>,
    covariates: DMatrix<f64>,
}

impl Dataset {
    /// Builds a dataset, checking that the treatment is binary with at least
    /// two rows in each arm, that dimensions agree and that every cell is
    /// finite. Rows with missing values must have been rejected upstream.
    pub fn new(
        treatment: Vec<f64>,
        mediators: DMatrix<f64>,
        outcome: DVector<f64>,
        covariates: DMatrix<f64>,
    ) -> Result<Self> {
        let n = treatment.len();
        if n == 0 {
            return Err(Error::invalid("dataset has no rows"));
        }
        if mediators.nrows() != n || outcome.len() != n || covariates.nrows() != n {
            return Err(Error::invalid(format!(
                "row counts disagree: treatment {n}, mediators {}, outcome {}, covariates {}",
                mediators.nrows(),
                outcome.len(),
                covariates.nrows()
            )));
        }
        if mediators.ncols() == 0 {
            return Err(Error::invalid("at least one mediator column is required"));
        }
        let mut treated = 0usize;
        let mut untreated = 0usize;
        for &t in &treatment {
            if t == 0.0 {
                untreated += 1;
            } else if t == 1.0 {
                treated += 1;
            } else {
                return Err(Error::invalid(format!("treatment value {t} is not 0 or 1")));
            }
        }
        if treated < 2 || untreated < 2 {
            return Err(Error::invalid(format!(
                "each treatment arm needs at least two rows (got {untreated} untreated, {treated} treated)"
            )));
        }
        let all_finite = mediators.iter().all(|v| v.is_finite())
            && outcome.iter().all(|v| v.is_finite())
            && covariates.iter().all(|v| v.is_finite());
        if !all_finite {
            return Err(Error::invalid("non-finite value in dataset"));
        }
        Ok(Dataset { treatment, mediators, outcome, covariates })
    }

    pub fn n_rows(&self) -> usize {
        self.treatment.len()
    }

    /// Number of mediators K.
    pub fn n_mediators(&self) -> usize {
        self.mediators.ncols()
    }

    /// Number of covariates P.
    pub fn n_covariates(&self) -> usize {
        self.covariates.ncols()
    }

    pub fn treatment(&self) -> &[f64] {
        &self.treatment
    }

    pub fn mediators(&self) -> &DMatrix<f64> {
        &self.mediators
    }

    pub fn outcome(&self) -> &DVector<f64> {
        &self.outcome
    }

    pub fn covariates(&self) -> &DMatrix<f64> {
        &self.covariates
    }

    /// True when the outcome column contains only 0 and 1.
    pub fn outcome_is_binary(&self) -> bool {
        self.outcome.iter().all(|&y| y == 0.0 || y == 1.0)
    }

    /// Restriction of the dataset to a single mediator column, keeping the
    /// treatment, outcome and covariates. This is the input of a simple
    /// (one-mediator-at-a-time) analysis.
    pub fn select_mediator(&self, k: usize) -> Result<Dataset> {
        if k >= self.n_mediators() {
            return Err(Error::invalid(format!(
                "mediator index {k} out of range for K={}",
                self.n_mediators()
            )));
        }
        Ok(Dataset {
            treatment: self.treatment.clone(),
            mediators: DMatrix::from_column_slice(self.n_rows(), 1, self.mediators.column(k).as_slice()),
            outcome: self.outcome.clone(),
            covariates: self.covariates.clone(),
        })
    }
}
