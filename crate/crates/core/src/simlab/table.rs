use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::dataset::{expit, Dataset};
use crate::error::{Error, Result};
use crate::linalg;
use crate::rng::{domain, substream};
use crate::simlab::spec::{SimFamily, SimulationModelSpec};

/// Counterfactual ground truth: for every simulated individual, both
/// potential values of every mediator plus the stored outcome noise, so
/// any potential outcome `Y(t, M¹(t₁), …, M^K(t_K))` can be produced on
/// demand and repeatably.
///
/// Both mediator arms share one residual draw, so `M^k(1) - M^k(0)` is
/// the treatment slope in every row, and all potential-outcome cells of a
/// row share one noise draw.
#[derive(Debug, Clone)]
pub struct CounterfactualTable {
    pub(crate) spec: SimulationModelSpec,
    pub(crate) treatment: Vec<u8>,
    pub(crate) m0: DMatrix<f64>,
    pub(crate) m1: DMatrix<f64>,
    pub(crate) covariates: DMatrix<f64>,
    /// Latent confounder draws; empty when the model has none.
    pub(crate) latent: Vec<f64>,
    /// ε₃ for the linear family, a uniform draw for the binary family.
    pub(crate) noise: Vec<f64>,
}

impl CounterfactualTable {
    pub fn n_rows(&self) -> usize {
        self.treatment.len()
    }

    pub fn n_mediators(&self) -> usize {
        self.m0.ncols()
    }

    pub fn spec(&self) -> &SimulationModelSpec {
        &self.spec
    }

    pub fn treatment(&self) -> &[u8] {
        &self.treatment
    }

    /// Potential mediator value `M^k(arm)`.
    pub fn mediator(&self, row: usize, k: usize, arm: u8) -> f64 {
        if arm == 0 {
            self.m0[(row, k)]
        } else {
            self.m1[(row, k)]
        }
    }

    /// Potential outcome `Y(t, M¹(arm₁), …, M^K(arm_K))`. Noise is stored
    /// per row, so repeated queries return the same value.
    pub fn potential_outcome(&self, row: usize, t: u8, mediator_arms: &[u8]) -> f64 {
        debug_assert_eq!(mediator_arms.len(), self.n_mediators());
        let mut lp = self.spec.outcome.intercept + self.spec.outcome.treatment * f64::from(t);
        for (k, &arm) in mediator_arms.iter().enumerate() {
            lp += self.spec.outcome.mediators[k] * self.mediator(row, k, arm);
        }
        self.finish_outcome(row, lp)
    }

    pub(crate) fn finish_outcome(&self, row: usize, mut lp: f64) -> f64 {
        for (c, coef) in self.spec.outcome.covariates.iter().enumerate() {
            lp += coef * self.covariates[(row, c)];
        }
        match self.spec.outcome.family {
            SimFamily::Linear => lp + self.noise[row],
            SimFamily::Logit => f64::from(self.noise[row] < expit(lp)),
        }
    }
}

/// Simulates `n_rows` i.i.d. individuals from the model: treatment,
/// latent confounder, jointly drawn mediator residuals (shared across
/// both treatment arms), covariates, and one outcome-noise draw.
pub fn generate_counterfactual_table(
    spec: &SimulationModelSpec,
    n_rows: usize,
    seed: u64,
) -> Result<CounterfactualTable> {
    spec.validate()?;
    if n_rows == 0 {
        return Err(Error::invalid("n_rows must be at least 1"));
    }
    let k = spec.n_mediators();
    let c = spec.n_covariates();
    let factor = linalg::psd_factor(&spec.residual_cov_matrix())?;
    let has_latent = spec.latent.is_some();

    let mut rng = substream(seed, &[domain::TABLE]);
    let mut treatment = Vec::with_capacity(n_rows);
    let mut m0 = DMatrix::zeros(n_rows, k);
    let mut m1 = DMatrix::zeros(n_rows, k);
    let mut covariates = DMatrix::zeros(n_rows, c);
    let mut latent = Vec::with_capacity(if has_latent { n_rows } else { 0 });
    let mut noise = Vec::with_capacity(n_rows);
    let mut std_normal = vec![0.0f64; k];

    for i in 0..n_rows {
        let t = u8::from(rng.random::<f64>() < spec.treatment_prob);
        treatment.push(t);

        let u = if has_latent {
            let draw: f64 = rng.sample(StandardNormal);
            latent.push(draw);
            draw
        } else {
            0.0
        };

        for z in std_normal.iter_mut() {
            *z = rng.sample(StandardNormal);
        }
        for a in 0..k {
            let mut residual = 0.0;
            for b in 0..=a {
                residual += factor[(a, b)] * std_normal[b];
            }
            let mut base = spec.mediators.intercepts[a] + residual;
            if let Some(lat) = &spec.latent {
                base += lat.loadings[a] * u;
            }
            m0[(i, a)] = base;
            m1[(i, a)] = base + spec.mediators.slopes[a];
        }

        for (j, gen) in spec.covariates.iter().enumerate() {
            covariates[(i, j)] = gen.sample(&mut rng);
        }

        noise.push(match spec.outcome.family {
            SimFamily::Linear => spec.outcome.noise_sd * rng.sample::<f64, _>(StandardNormal),
            SimFamily::Logit => rng.random::<f64>(),
        });
    }

    Ok(CounterfactualTable { spec: spec.clone(), treatment, m0, m1, covariates, latent, noise })
}

/// Samples `n` rows without replacement and keeps, per row, only the
/// values consistent with the realized treatment: `(T, Z(T), Y(T, Z(T)))`
/// plus the covariates. The latent confounder is exported as an extra
/// covariate column only when the model marks it observed.
pub fn extract_observed(table: &CounterfactualTable, n: usize, seed: u64) -> Result<Dataset> {
    if n > table.n_rows() {
        return Err(Error::SampleTooLarge { requested: n, available: table.n_rows() });
    }
    if n == 0 {
        return Err(Error::invalid("cannot extract zero rows"));
    }
    let mut rng = substream(seed, &[domain::EXTRACT]);
    let indices = rand::seq::index::sample(&mut rng, table.n_rows(), n);

    let k = table.n_mediators();
    let c = table.spec.n_covariates();
    let export_latent = table.spec.latent.as_ref().is_some_and(|l| l.observed);
    let p = c + usize::from(export_latent);

    let mut treatment = Vec::with_capacity(n);
    let mut mediators = DMatrix::zeros(n, k);
    let mut outcome = DVector::zeros(n);
    let mut covariates = DMatrix::zeros(n, p);
    let arms0 = vec![0u8; k];
    let arms1 = vec![1u8; k];

    for (out_row, idx) in indices.iter().enumerate() {
        let t = table.treatment[idx];
        treatment.push(f64::from(t));
        for a in 0..k {
            mediators[(out_row, a)] = table.mediator(idx, a, t);
        }
        let arms = if t == 0 { &arms0 } else { &arms1 };
        outcome[out_row] = table.potential_outcome(idx, t, arms);
        for j in 0..c {
            covariates[(out_row, j)] = table.covariates[(idx, j)];
        }
        if export_latent {
            covariates[(out_row, c)] = table.latent[idx];
        }
    }

    Dataset::new(treatment, mediators, outcome, covariates)
}
