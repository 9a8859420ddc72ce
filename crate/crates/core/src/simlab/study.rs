use std::path::PathBuf;

use rayon::prelude::*;
use serde::Serialize;

use crate::engine::{estimate_effects, EffectSummary, EstimateOptions};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, domain};
use crate::simlab::cache::cached_monte_carlo_truth;
use crate::simlab::simple_analysis;
use crate::simlab::spec::SimulationModelSpec;
use crate::simlab::table::{extract_observed, generate_counterfactual_table};
use crate::simlab::truth::TrueEffects;

/// Grid and budget of a repeated-run estimator study.
#[derive(Debug, Clone)]
pub struct StudyConfig {
    pub spec: SimulationModelSpec,
    pub sample_sizes: Vec<usize>,
    /// Mediator residual correlations applied via
    /// [`SimulationModelSpec::with_correlation`].
    pub correlations: Vec<f64>,
    pub runs_per_cell: usize,
    pub n_draws: usize,
    pub n_sims: usize,
    pub ci_level: f64,
    pub master_seed: u64,
    /// Rows of the per-cell ground-truth oracle table.
    pub truth_rows: usize,
    pub truth_seed: u64,
    pub cache_dir: Option<PathBuf>,
}

impl StudyConfig {
    pub fn new(spec: SimulationModelSpec) -> Self {
        StudyConfig {
            spec,
            sample_sizes: vec![1000],
            correlations: vec![0.0],
            runs_per_cell: 200,
            n_draws: 1000,
            n_sims: 1000,
            ci_level: 0.95,
            master_seed: 0,
            truth_rows: 1_000_000,
            truth_seed: 1,
            cache_dir: None,
        }
    }

    fn validate(&self) -> Result<()> {
        self.spec.validate()?;
        if self.runs_per_cell < 2 {
            return Err(Error::invalid("runs_per_cell must be at least 2"));
        }
        if self.sample_sizes.is_empty() || self.correlations.is_empty() {
            return Err(Error::invalid("study grids must be non-empty"));
        }
        if self.truth_rows < 2 {
            return Err(Error::invalid("truth_rows must be at least 2"));
        }
        Ok(())
    }
}

/// Aggregated metrics of one estimator for one effect in one grid cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellMetrics {
    pub estimator: String,
    pub effect: String,
    pub sample_size: usize,
    pub correlation: f64,
    pub truth: f64,
    /// `Θ - mean(Θ̂)`.
    pub bias: f64,
    /// Share of runs whose interval covered the truth.
    pub coverage: f64,
    /// Population variance of the point estimates across runs.
    pub variance: f64,
    /// `mean((Θ̂ - Θ)²)`; equals `variance + bias²` up to rounding.
    pub mse: f64,
    /// Successful runs behind the numbers.
    pub runs: usize,
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyMetrics {
    pub rows: Vec<CellMetrics>,
}

/// One row of the long-format study table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LongRow {
    pub estimator: String,
    pub effect: String,
    pub metric: String,
    pub sample_size: usize,
    pub correlation: f64,
    pub value: f64,
}

impl StudyMetrics {
    /// Long format suitable for external plotting: one row per
    /// (estimator, effect, metric) with metrics
    /// truth/bias/coverage/variance/mse/failures.
    pub fn long_rows(&self) -> Vec<LongRow> {
        let mut rows = Vec::with_capacity(self.rows.len() * 6);
        for cell in &self.rows {
            let mut push = |metric: &str, value: f64| {
                rows.push(LongRow {
                    estimator: cell.estimator.clone(),
                    effect: cell.effect.clone(),
                    metric: metric.to_string(),
                    sample_size: cell.sample_size,
                    correlation: cell.correlation,
                    value,
                });
            };
            push("truth", cell.truth);
            push("bias", cell.bias);
            push("coverage", cell.coverage);
            push("variance", cell.variance);
            push("mse", cell.mse);
            push("failures", cell.failures as f64);
        }
        rows
    }

    pub fn get(&self, estimator: &str, effect: &str, sample_size: usize, correlation: f64) -> Option<&CellMetrics> {
        self.rows.iter().find(|c| {
            c.estimator == estimator
                && c.effect == effect
                && c.sample_size == sample_size
                && (c.correlation - correlation).abs() < 1e-12
        })
    }
}

/// Point estimate and interval for one effect from one run.
#[derive(Debug, Clone, Copy)]
struct Recorded {
    point: f64,
    ci_low: f64,
    ci_high: f64,
}

impl From<&EffectSummary> for Recorded {
    fn from(s: &EffectSummary) -> Self {
        Recorded { point: s.point, ci_low: s.ci_low, ci_high: s.ci_high }
    }
}

/// Per-run estimates: the multiple analysis and one simple analysis per
/// mediator, each either a list of (effect, record) pairs or a failure.
struct RunOutcome {
    multiple: Option<Vec<(String, Recorded)>>,
    simple: Vec<Option<Vec<(String, Recorded)>>>,
}

fn run_one(
    spec: &SimulationModelSpec,
    sample_size: usize,
    run_seed: u64,
    options: &EstimateOptions,
) -> RunOutcome {
    let k = spec.n_mediators();
    let family = spec.outcome.family.analysis_family();

    let data = generate_counterfactual_table(spec, sample_size, derive_seed(run_seed, &[domain::TABLE]))
        .and_then(|table| extract_observed(&table, sample_size, derive_seed(run_seed, &[domain::EXTRACT])));
    let data = match data {
        Ok(d) => d,
        Err(_) => return RunOutcome { multiple: None, simple: vec![None; k] },
    };

    let multiple_options = EstimateOptions { seed: derive_seed(run_seed, &[0]), ..*options };
    let multiple = estimate_effects(&data, family, &multiple_options).ok().map(|est| {
        let e = &est.estimates;
        let mut records = Vec::with_capacity(k + 3);
        for (j, med) in e.per_mediator.iter().enumerate() {
            records.push((format!("delta_{}", j + 1), Recorded::from(&med.delta.avg)));
        }
        records.push(("delta_z".to_string(), Recorded::from(&e.delta_z.avg)));
        records.push(("zeta".to_string(), Recorded::from(&e.zeta.avg)));
        records.push(("tau".to_string(), Recorded::from(&e.tau)));
        records
    });

    let simple = (0..k)
        .map(|j| {
            let simple_options = EstimateOptions { seed: derive_seed(run_seed, &[1 + j as u64]), ..*options };
            simple_analysis(&data, j, family, &simple_options).ok().map(|est| {
                let e = &est.estimates;
                vec![
                    (format!("delta_{}", j + 1), Recorded::from(&e.per_mediator[0].delta.avg)),
                    ("zeta".to_string(), Recorded::from(&e.zeta.avg)),
                    ("tau".to_string(), Recorded::from(&e.tau)),
                ]
            })
        })
        .collect();

    RunOutcome { multiple, simple }
}

fn aggregate(
    estimator: &str,
    effect: &str,
    sample_size: usize,
    correlation: f64,
    truth: &TrueEffects,
    outcomes: &[Option<Vec<(String, Recorded)>>],
) -> CellMetrics {
    let theta = truth.effect_value(effect).expect("tracked effects always have a truth value");
    let records: Vec<Recorded> = outcomes
        .iter()
        .flatten()
        .flat_map(|list| list.iter().filter(|(name, _)| name == effect).map(|(_, r)| *r))
        .collect();
    let failures = outcomes.iter().filter(|o| o.is_none()).count();
    let runs = records.len();
    let mean = records.iter().map(|r| r.point).sum::<f64>() / runs as f64;
    let variance = records.iter().map(|r| (r.point - mean).powi(2)).sum::<f64>() / runs as f64;
    let mse = records.iter().map(|r| (r.point - theta).powi(2)).sum::<f64>() / runs as f64;
    let covered = records.iter().filter(|r| r.ci_low <= theta && theta <= r.ci_high).count();
    CellMetrics {
        estimator: estimator.to_string(),
        effect: effect.to_string(),
        sample_size,
        correlation,
        truth: theta,
        bias: theta - mean,
        coverage: covered as f64 / runs as f64,
        variance,
        mse,
        runs,
        failures,
    }
}

/// Runs the full study grid: per cell, oracle truth from a large cached
/// table, then `runs_per_cell` independent draws of an observed dataset
/// analyzed by the multiple-mediator estimator and by one simple analysis
/// per mediator. Per-run failures are counted, not fatal.
///
/// Every run derives its seed from `(master_seed, cell, run)`, so results
/// are independent of scheduling and thread count.
pub fn run_study(config: &StudyConfig) -> Result<StudyMetrics> {
    config.validate()?;
    let k = config.spec.n_mediators();
    let options = EstimateOptions {
        n_draws: config.n_draws,
        n_sims: config.n_sims,
        ci_level: config.ci_level,
        seed: 0,
    };

    let mut rows = Vec::new();
    let mut cell_index = 0u64;
    for &sample_size in &config.sample_sizes {
        for &correlation in &config.correlations {
            let spec = config.spec.with_correlation(correlation)?;
            let truth = cached_monte_carlo_truth(
                &spec,
                config.truth_rows,
                config.truth_seed,
                config.cache_dir.as_deref(),
            )?;

            let outcomes: Vec<RunOutcome> = (0..config.runs_per_cell)
                .into_par_iter()
                .map(|run| {
                    let run_seed =
                        derive_seed(config.master_seed, &[domain::STUDY_RUN, cell_index, run as u64]);
                    run_one(&spec, sample_size, run_seed, &options)
                })
                .collect();

            let multiple: Vec<Option<Vec<(String, Recorded)>>> =
                outcomes.iter().map(|o| o.multiple.clone()).collect();
            let mut effects: Vec<String> = (1..=k).map(|j| format!("delta_{j}")).collect();
            effects.extend(["delta_z".to_string(), "zeta".to_string(), "tau".to_string()]);
            for effect in &effects {
                rows.push(aggregate("multiple", effect, sample_size, correlation, &truth, &multiple));
            }
            for j in 0..k {
                let simple_j: Vec<Option<Vec<(String, Recorded)>>> =
                    outcomes.iter().map(|o| o.simple[j].clone()).collect();
                for effect in [format!("delta_{}", j + 1), "zeta".to_string(), "tau".to_string()] {
                    rows.push(aggregate(
                        &format!("simple_{}", j + 1),
                        &effect,
                        sample_size,
                        correlation,
                        &truth,
                        &simple_j,
                    ));
                }
            }
            cell_index += 1;
        }
    }
    Ok(StudyMetrics { rows })
}
