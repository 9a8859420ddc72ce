//! Counterfactual ground-truth simulation and the estimator study harness.
//!
//! The lab generates large tables of potential mediator values and
//! on-demand potential outcomes from a known causal model, takes their
//! contrast means as oracle effect values, extracts observed datasets the
//! way a real study would see them, and measures estimator bias,
//! coverage, variance and MSE over repeated runs.

mod cache;
mod spec;
mod study;
mod table;
mod truth;

pub use cache::cached_monte_carlo_truth;
pub use spec::{
    presets, CovariateGenerator, LatentConfounder, MediatorModel, OutcomeModel, SimFamily,
    SimulationModelSpec,
};
pub use study::{run_study, CellMetrics, LongRow, StudyConfig, StudyMetrics};
pub use table::{extract_observed, generate_counterfactual_table, CounterfactualTable};
pub use truth::{monte_carlo_truth, ArmPair, TrueEffects, TruthStandardErrors};

use crate::dataset::{Dataset, Family};
use crate::engine::{estimate_effects, EstimateOptions, Estimation};
use crate::error::Result;

/// Single-mediator mediation analysis of mediator `mediator_index`: all
/// other mediators are dropped from both models and the K = 1 estimator
/// runs on the rest. This is the baseline whose bias under mediator
/// correlation the study harness measures.
pub fn simple_analysis(
    data: &Dataset,
    mediator_index: usize,
    family: Family,
    options: &EstimateOptions,
) -> Result<Estimation> {
    let reduced = data.select_mediator(mediator_index)?;
    estimate_effects(&reduced, family, options)
}
