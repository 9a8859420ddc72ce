//! Causal mediation analysis with multiple, possibly correlated mediators.
//!
//! The crate estimates direct, joint-indirect and per-mediator indirect
//! effects of a binary treatment on an outcome when the mediators may be
//! correlated through an unobserved common cause. Estimation follows a
//! quasi-Bayesian scheme: regression fits for the mediator system and the
//! outcome model, repeated parameter draws from their asymptotic sampling
//! distributions, and per-draw simulation of counterfactual mediators and
//! outcomes.
//!
//! Modules:
//! - [`regression`]: OLS for the mediator system, IRLS for binary outcome
//!   models, and parameter sampling.
//! - [`engine`]: the counterfactual simulation estimator and its summaries.
//! - [`closed_form`]: analytic effect formulas for the linear and binary
//!   outcome models, used as cross-checks for the simulation engine.
//! - [`simlab`]: counterfactual ground-truth generator, single-mediator
//!   baseline analysis and the repeated-run study harness.

pub mod closed_form;
pub mod dataset;
pub mod engine;
pub mod error;
pub mod linalg;
pub mod regression;
pub mod rng;
pub mod simlab;

#[cfg(test)]
pub(crate) mod test_support;

pub use dataset::{Dataset, Family};
pub use error::{Error, Result};
