//! Quasi-Bayesian counterfactual simulation estimator.
//!
//! The estimator runs four steps: fit the mediator system and the outcome
//! model; draw R parameter sets from their asymptotic sampling
//! distributions; for each draw simulate I individuals' potential
//! mediators (correlated through Σ₂, one residual vector per individual
//! reused across treatment arms) and their expected potential outcomes;
//! average the per-individual contrasts into per-draw effects and
//! summarize the R-draw empirical distributions.
//!
//! Reusing one residual per individual couples the counterfactual arms;
//! point estimates are unchanged while the effect decompositions
//! `τ = δ^Z(t) + ζ(1-t)` and `δ^Z = (1/K)Σ(δ^k + η^k)` become exact
//! identities draw by draw.

mod effects;
mod simulate;
mod summary;

pub use effects::{ArmSummary, DrawEffects, EffectEstimates, EffectSummary, MediatorEffects};
pub use simulate::{simulate_potential_mediators, simulate_potential_outcomes, PotentialMediators};
pub use summary::summarize;

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dataset::{Dataset, Family};
use crate::error::{Error, Result};
use crate::linalg::{self, CompensatedSum};
use crate::regression::{fit_mediator_system, fit_outcome, sample_parameters, ParameterDraw};
use crate::rng::{domain, substream};

/// Tuning knobs of the estimator.
#[derive(Debug, Clone, Copy)]
pub struct EstimateOptions {
    /// Number of parameter draws R.
    pub n_draws: usize,
    /// Simulated individuals per draw I.
    pub n_sims: usize,
    /// Confidence level of the percentile intervals.
    pub ci_level: f64,
    /// Master seed; all randomness derives from it.
    pub seed: u64,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        EstimateOptions { n_draws: 1000, n_sims: 1000, ci_level: 0.95, seed: 0 }
    }
}

impl EstimateOptions {
    pub fn validate(&self) -> Result<()> {
        if self.n_draws < 2 {
            return Err(Error::invalid("at least two parameter draws are required"));
        }
        if self.n_sims < 1 {
            return Err(Error::invalid("at least one simulated individual is required"));
        }
        if !(self.ci_level > 0.5 && self.ci_level < 1.0) {
            return Err(Error::invalid("ci_level must lie in (0.5, 1)"));
        }
        Ok(())
    }
}

/// Result of one estimation: summaries plus the raw draw distributions.
#[derive(Debug, Clone)]
pub struct Estimation {
    pub estimates: EffectEstimates,
    pub draws: DrawEffects,
}

struct ReplicationEffects {
    delta0: Vec<f64>,
    delta1: Vec<f64>,
    eta0: Vec<f64>,
    eta1: Vec<f64>,
    delta_z0: f64,
    delta_z1: f64,
    zeta0: f64,
    zeta1: f64,
    tau: f64,
}

/// One replication: resample covariate rows, simulate I individuals with
/// shared residuals and average the outcome contrasts.
fn replicate(
    data: &Dataset,
    draw: &ParameterDraw,
    sigma2_factor: &DMatrix<f64>,
    n_sims: usize,
    rng: &mut ChaCha8Rng,
) -> ReplicationEffects {
    use rand_distr::StandardNormal;

    let n = data.n_rows();
    let k = draw.n_mediators();
    let p = data.n_covariates();
    let x = data.covariates();
    let med = &draw.mediator;
    let out = &draw.outcome;
    let family = draw.family;

    let mut acc_delta0 = vec![CompensatedSum::new(); k];
    let mut acc_delta1 = vec![CompensatedSum::new(); k];
    let mut acc_eta0 = vec![CompensatedSum::new(); k];
    let mut acc_eta1 = vec![CompensatedSum::new(); k];
    let mut acc_delta_z0 = CompensatedSum::new();
    let mut acc_delta_z1 = CompensatedSum::new();
    let mut acc_zeta0 = CompensatedSum::new();
    let mut acc_zeta1 = CompensatedSum::new();
    let mut acc_tau = CompensatedSum::new();

    let mut std_normal = vec![0.0f64; k];
    let mut z0 = vec![0.0f64; k];
    let mut z1 = vec![0.0f64; k];

    for _ in 0..n_sims {
        let row = rng.random_range(0..n);
        for z in std_normal.iter_mut() {
            *z = rng.sample(StandardNormal);
        }

        let mut base0 = 0.0;
        let mut base1 = 0.0;
        for a in 0..k {
            let mut residual = 0.0;
            for b in 0..=a {
                residual += sigma2_factor[(a, b)] * std_normal[b];
            }
            let mut mean0 = med.alpha2[a];
            for j in 0..p {
                mean0 += med.xi2[(a, j)] * x[(row, j)];
            }
            z0[a] = mean0 + residual;
            z1[a] = mean0 + med.beta2[a] + residual;
            base0 += out.gamma[a] * z0[a];
            base1 += out.gamma[a] * z1[a];
        }

        let mut intercept = out.alpha3;
        for j in 0..p {
            intercept += out.xi3[j] * x[(row, j)];
        }

        let y00 = family.mean(intercept + base0);
        let y01 = family.mean(intercept + base1);
        let y10 = family.mean(intercept + out.beta3 + base0);
        let y11 = family.mean(intercept + out.beta3 + base1);

        acc_tau.add(y11 - y00);
        acc_delta_z0.add(y01 - y00);
        acc_delta_z1.add(y11 - y10);
        acc_zeta0.add(y10 - y00);
        acc_zeta1.add(y11 - y01);

        for a in 0..k {
            let swap = out.gamma[a] * (z0[a] - z1[a]);
            // Y(1, M^k(0), W^k(1)) and Y(0, M^k(1), W^k(0)).
            let y_mixed1 = family.mean(intercept + out.beta3 + base1 + swap);
            let y_mixed0 = family.mean(intercept + base0 - swap);
            acc_delta1[a].add(y11 - y_mixed1);
            acc_eta1[a].add(y_mixed1 - y10);
            acc_delta0[a].add(y_mixed0 - y00);
            acc_eta0[a].add(y01 - y_mixed0);
        }
    }

    let inv = 1.0 / n_sims as f64;
    ReplicationEffects {
        delta0: acc_delta0.iter().map(|s| s.total() * inv).collect(),
        delta1: acc_delta1.iter().map(|s| s.total() * inv).collect(),
        eta0: acc_eta0.iter().map(|s| s.total() * inv).collect(),
        eta1: acc_eta1.iter().map(|s| s.total() * inv).collect(),
        delta_z0: acc_delta_z0.total() * inv,
        delta_z1: acc_delta_z1.total() * inv,
        zeta0: acc_zeta0.total() * inv,
        zeta1: acc_zeta1.total() * inv,
        tau: acc_tau.total() * inv,
    }
}

/// Runs the full estimator on observed data.
///
/// Replications execute in parallel; each one draws from its own
/// substream of the master seed, so the output is identical for any
/// thread count, bit for bit.
pub fn estimate_effects(data: &Dataset, family: Family, options: &EstimateOptions) -> Result<Estimation> {
    options.validate()?;
    let med_fit = fit_mediator_system(data)?;
    let out_fit = fit_outcome(data, family)?;
    let param_draws = sample_parameters(
        &med_fit,
        &out_fit,
        options.n_draws,
        crate::rng::derive_seed(options.seed, &[domain::PARAMETER_DRAWS]),
    )?;
    let sigma2_factor = linalg::psd_factor(&med_fit.sigma2)?;

    let replications: Vec<ReplicationEffects> = param_draws
        .par_iter()
        .enumerate()
        .map(|(r, draw)| {
            let mut rng = substream(options.seed, &[domain::SIMULATION, r as u64]);
            replicate(data, draw, &sigma2_factor, options.n_sims, &mut rng)
        })
        .collect();

    let k = data.n_mediators();
    let mut draws = DrawEffects::with_capacity(k, options.n_draws);
    for rep in &replications {
        for a in 0..k {
            draws.delta0[a].push(rep.delta0[a]);
            draws.delta1[a].push(rep.delta1[a]);
            draws.eta0[a].push(rep.eta0[a]);
            draws.eta1[a].push(rep.eta1[a]);
        }
        draws.delta_z0.push(rep.delta_z0);
        draws.delta_z1.push(rep.delta_z1);
        draws.zeta0.push(rep.zeta0);
        draws.zeta1.push(rep.zeta1);
        draws.tau.push(rep.tau);
    }

    let estimates = summarize(&draws, options.ci_level, options.n_sims, options.seed)?;
    Ok(Estimation { estimates, draws })
}

#[cfg(test)]
mod tests;
