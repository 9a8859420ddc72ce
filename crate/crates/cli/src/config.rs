use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use medimux_core::engine::EstimateOptions;
use medimux_core::Family;
use serde::Deserialize;

use crate::args::MediateArgs;
use crate::error::{CliError, Result};

/// Column role declarations as they appear in config files.
#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ColumnsSection {
    pub treatment: Option<String>,
    pub mediators: Option<Vec<String>>,
    pub outcome: Option<String>,
    pub covariates: Option<Vec<String>>,
}

/// On-disk analysis configuration (TOML). Command-line flags override
/// every field.
#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub input: Option<PathBuf>,
    pub family: Option<String>,
    pub draws: Option<usize>,
    pub sims: Option<usize>,
    pub ci_level: Option<f64>,
    pub seed: Option<u64>,
    pub simple: Option<usize>,
    pub output: Option<PathBuf>,
    pub draws_csv: Option<PathBuf>,
    #[serde(default)]
    pub columns: ColumnsSection,
    #[serde(default)]
    pub boxcox: BTreeMap<String, f64>,
}

/// Fully resolved analysis configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub input: PathBuf,
    pub treatment: String,
    pub mediators: Vec<String>,
    pub outcome: String,
    pub covariates: Vec<String>,
    pub family: Family,
    pub options: EstimateOptions,
    /// One-based mediator index for a simple analysis.
    pub simple: Option<usize>,
    pub boxcox: BTreeMap<String, f64>,
    pub output: Option<PathBuf>,
    pub draws_csv: Option<PathBuf>,
}

fn parse_family(name: &str) -> Result<Family> {
    match name {
        "linear" => Ok(Family::Linear),
        "logit" => Ok(Family::Logit),
        "probit" => Ok(Family::Probit),
        other => Err(CliError::Config(format!(
            "unknown family {other:?}; expected linear, logit or probit"
        ))),
    }
}

fn parse_boxcox_flag(entry: &str) -> Result<(String, f64)> {
    let (column, lambda) = entry
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("--boxcox expects COL=LAMBDA, got {entry:?}")))?;
    let lambda: f64 = lambda
        .parse()
        .map_err(|_| CliError::Config(format!("--boxcox lambda {lambda:?} is not a number")))?;
    Ok((column.to_string(), lambda))
}

impl RunConfig {
    /// Merges an optional config file with the command-line flags, flags
    /// winning, then validates the result.
    pub fn resolve(args: &MediateArgs) -> Result<RunConfig> {
        let file: FileConfig = match &args.config {
            Some(path) => toml::from_str(&std::fs::read_to_string(path)?)?,
            None => FileConfig::default(),
        };

        let input = args
            .input
            .clone()
            .or(file.input)
            .ok_or_else(|| CliError::Config("an input file is required (--input)".into()))?;
        let treatment = args
            .treatment
            .clone()
            .or(file.columns.treatment)
            .ok_or_else(|| CliError::Config("a treatment column is required (--treatment)".into()))?;
        let mediators = args
            .mediators
            .clone()
            .or(file.columns.mediators)
            .ok_or_else(|| CliError::Config("mediator columns are required (--mediators)".into()))?;
        let outcome = args
            .outcome
            .clone()
            .or(file.columns.outcome)
            .ok_or_else(|| CliError::Config("an outcome column is required (--outcome)".into()))?;
        let covariates = args.covariates.clone().or(file.columns.covariates).unwrap_or_default();

        let family = match &args.family {
            Some(f) => Family::from(*f),
            None => parse_family(file.family.as_deref().unwrap_or("linear"))?,
        };

        let defaults = EstimateOptions::default();
        let options = EstimateOptions {
            n_draws: args.draws.or(file.draws).unwrap_or(defaults.n_draws),
            n_sims: args.sims.or(file.sims).unwrap_or(defaults.n_sims),
            ci_level: args.ci.or(file.ci_level).unwrap_or(defaults.ci_level),
            seed: args.seed.or(file.seed).unwrap_or(defaults.seed),
        };

        let mut boxcox = file.boxcox;
        for entry in &args.boxcox {
            let (column, lambda) = parse_boxcox_flag(entry)?;
            boxcox.insert(column, lambda);
        }

        let config = RunConfig {
            input,
            treatment,
            mediators,
            outcome,
            covariates,
            family,
            options,
            simple: args.simple.or(file.simple),
            boxcox,
            output: args.output.clone().or(file.output),
            draws_csv: args.draws_csv.clone().or(file.draws_csv),
        };
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<()> {
        if self.mediators.is_empty() {
            return Err(CliError::Config("at least one mediator column is required".into()));
        }
        let mut roles: Vec<&String> = vec![&self.treatment, &self.outcome];
        roles.extend(self.mediators.iter());
        roles.extend(self.covariates.iter());
        for (i, a) in roles.iter().enumerate() {
            for b in roles.iter().skip(i + 1) {
                if a == b {
                    return Err(CliError::Config(format!(
                        "column {a:?} is assigned to more than one role"
                    )));
                }
            }
        }
        self.options.validate().map_err(CliError::Core)?;
        if let Some(k) = self.simple {
            if k == 0 || k > self.mediators.len() {
                return Err(CliError::Config(format!(
                    "--simple {k} is out of range; mediators are numbered 1..={}",
                    self.mediators.len()
                )));
            }
        }
        if self.boxcox.contains_key(&self.treatment) {
            return Err(CliError::Config("the treatment column cannot be box-cox transformed".into()));
        }
        for column in self.boxcox.keys() {
            let known = *column == self.outcome
                || self.mediators.contains(column)
                || self.covariates.contains(column);
            if !known {
                return Err(CliError::Config(format!(
                    "box-cox column {column:?} is not among the declared columns"
                )));
            }
        }
        Ok(())
    }
}

/// Reads and validates a simulation model specification (TOML).
pub fn load_model(path: &Path) -> Result<medimux_core::simlab::SimulationModelSpec> {
    let spec: medimux_core::simlab::SimulationModelSpec =
        toml::from_str(&std::fs::read_to_string(path)?)?;
    spec.validate().map_err(CliError::Core)?;
    Ok(spec)
}

/// Cache directory: explicit flag, else the MEDIMUX_CACHE_DIR variable.
pub fn resolve_cache_dir(flag: Option<&Path>) -> Option<PathBuf> {
    flag.map(Path::to_path_buf)
        .or_else(|| std::env::var_os("MEDIMUX_CACHE_DIR").map(PathBuf::from))
}
