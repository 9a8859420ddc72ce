use std::collections::BTreeMap;
use std::path::Path;

use medimux_core::{Dataset, Family};
use nalgebra::{DMatrix, DVector};

use crate::error::{CliError, Result};

/// Column role assignment for ingestion.
#[derive(Debug, Clone)]
pub struct ColumnRoles {
    pub treatment: String,
    pub mediators: Vec<String>,
    pub outcome: String,
    pub covariates: Vec<String>,
}

/// Row accounting from one ingestion pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct IngestReport {
    pub rows_read: usize,
    /// Rows dropped because a declared cell was missing or unparseable.
    pub rows_rejected: usize,
}

/// Box-Cox power transform `(v^λ - 1)/λ`, with the `λ = 0` continuity
/// limit `ln v`. All values must be strictly positive.
pub fn boxcox(values: &[f64], lambda: f64) -> Result<Vec<f64>> {
    values
        .iter()
        .enumerate()
        .map(|(row, &v)| {
            if v <= 0.0 {
                Err(CliError::NonPositiveValue { row, value: v })
            } else if lambda == 0.0 {
                Ok(v.ln())
            } else {
                Ok((v.powf(lambda) - 1.0) / lambda)
            }
        })
        .collect()
}

/// Reads a CSV file into a typed dataset.
///
/// Declared columns are parsed as floats; a row with any missing or
/// unparseable declared cell is rejected and counted. Box-Cox transforms
/// apply to named mediator/outcome/covariate columns after parsing.
/// Validation order after filtering: emptiness, treatment coding, outcome
/// coding (binary families only), then the dataset invariants.
pub fn ingest_csv(
    path: &Path,
    roles: &ColumnRoles,
    family: Family,
    boxcox_map: &BTreeMap<String, f64>,
) -> Result<(Dataset, IngestReport)> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_path(path)?;
    let headers = reader.headers()?.clone();
    let index_of = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::MissingColumn(name.to_string()))
    };

    let t_idx = index_of(&roles.treatment)?;
    let m_idx: Vec<usize> = roles.mediators.iter().map(|n| index_of(n)).collect::<Result<_>>()?;
    let y_idx = index_of(&roles.outcome)?;
    let x_idx: Vec<usize> = roles.covariates.iter().map(|n| index_of(n)).collect::<Result<_>>()?;

    let declared: Vec<usize> = std::iter::once(t_idx)
        .chain(m_idx.iter().copied())
        .chain(std::iter::once(y_idx))
        .chain(x_idx.iter().copied())
        .collect();

    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut rows_read = 0usize;
    let mut rows_rejected = 0usize;
    for record in reader.records() {
        let record = record?;
        rows_read += 1;
        let parsed: Option<Vec<f64>> = declared
            .iter()
            .map(|&i| record.get(i).and_then(|cell| cell.trim().parse::<f64>().ok()))
            .collect();
        match parsed {
            Some(values) => rows.push(values),
            None => rows_rejected += 1,
        }
    }
    if rows.is_empty() {
        return Err(CliError::EmptyAfterFiltering);
    }

    let n = rows.len();
    let k = roles.mediators.len();
    let p = roles.covariates.len();
    // Parsed layout per row: [t, mediators.., y, covariates..].
    let mut treatment: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    let mut mediators: Vec<Vec<f64>> =
        (0..k).map(|j| rows.iter().map(|r| r[1 + j]).collect()).collect();
    let mut outcome: Vec<f64> = rows.iter().map(|r| r[1 + k]).collect();
    let mut covariates: Vec<Vec<f64>> =
        (0..p).map(|j| rows.iter().map(|r| r[2 + k + j]).collect()).collect();

    for (column, &lambda) in boxcox_map {
        if *column == roles.outcome {
            outcome = boxcox(&outcome, lambda)?;
        } else if let Some(j) = roles.mediators.iter().position(|m| m == column) {
            mediators[j] = boxcox(&mediators[j], lambda)?;
        } else if let Some(j) = roles.covariates.iter().position(|c| c == column) {
            covariates[j] = boxcox(&covariates[j], lambda)?;
        } else if *column == roles.treatment {
            return Err(CliError::Config("the treatment column cannot be box-cox transformed".into()));
        } else {
            return Err(CliError::Config(format!(
                "box-cox column {column:?} is not among the declared columns"
            )));
        }
    }

    if let Some(&bad) = treatment.iter().find(|&&t| t != 0.0 && t != 1.0) {
        return Err(CliError::NonBinaryTreatment(bad));
    }
    if family.is_binary() {
        if let Some(&bad) = outcome.iter().find(|&&y| y != 0.0 && y != 1.0) {
            return Err(CliError::NonBinaryOutcome(bad));
        }
    }

    let mediator_matrix = DMatrix::from_fn(n, k, |i, j| mediators[j][i]);
    let covariate_matrix = DMatrix::from_fn(n, p, |i, j| covariates[j][i]);
    let outcome_vec = DVector::from_vec(std::mem::take(&mut outcome));
    let dataset = Dataset::new(
        std::mem::take(&mut treatment),
        mediator_matrix,
        outcome_vec,
        covariate_matrix,
    )?;
    Ok((dataset, IngestReport { rows_read, rows_rejected }))
}
