use std::path::Path;

use medimux_core::engine::{DrawEffects, EffectEstimates};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::ingest::IngestReport;

pub const REPORT_SCHEMA: &str = "medimux/report/v1";
pub const TRUTH_SCHEMA: &str = "medimux/truth/v1";
pub const STUDY_SCHEMA: &str = "medimux/study/v1";
pub const CLOSED_FORM_SCHEMA: &str = "medimux/closed_form/v1";

/// Reproducibility block carried by every analysis report. No wall-clock
/// fields: identical inputs must produce identical bytes.
#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub version: &'static str,
    pub input_digest: String,
    pub seed: u64,
    pub draws: usize,
    pub sims: usize,
}

pub fn file_digest(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path)?;
    let digest = Sha256::digest(&bytes);
    let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
    Ok(format!("sha256:{hex}"))
}

/// Full mediation analysis report.
#[derive(Debug, Serialize)]
pub struct Report<'a> {
    pub schema_version: &'static str,
    /// "multiple" or "simple".
    pub analysis: &'static str,
    pub family: String,
    pub treatment: String,
    pub outcome: String,
    /// Mediator column names in effect order.
    pub mediators: Vec<String>,
    pub covariates: Vec<String>,
    /// Set for simple analyses: the mediator the report is about.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub simple_mediator: Option<String>,
    pub ingest: IngestReport,
    pub effects: &'a EffectEstimates,
    pub provenance: Provenance,
}

/// Writes serialized JSON to a file, or to stdout when no path is given.
pub fn emit_json<T: Serialize>(value: &T, output: Option<&Path>) -> Result<()> {
    let mut body = serde_json::to_string_pretty(value)?;
    body.push('\n');
    match output {
        Some(path) => std::fs::write(path, body)?,
        None => print!("{body}"),
    }
    Ok(())
}

/// Raw draw distributions in wide CSV form: one row per draw, one column
/// per effect.
pub fn write_draws_csv(draws: &DrawEffects, path: &Path) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    let k = draws.n_mediators();
    let mut header = vec!["draw".to_string()];
    for j in 1..=k {
        header.push(format!("delta_{j}_t0"));
        header.push(format!("delta_{j}_t1"));
        header.push(format!("eta_{j}_t0"));
        header.push(format!("eta_{j}_t1"));
    }
    header.extend(
        ["delta_z_t0", "delta_z_t1", "zeta_t0", "zeta_t1", "tau"].map(str::to_string),
    );
    writer.write_record(&header)?;
    for r in 0..draws.n_draws() {
        let mut record = vec![r.to_string()];
        for j in 0..k {
            record.push(draws.delta0[j][r].to_string());
            record.push(draws.delta1[j][r].to_string());
            record.push(draws.eta0[j][r].to_string());
            record.push(draws.eta1[j][r].to_string());
        }
        record.push(draws.delta_z0[r].to_string());
        record.push(draws.delta_z1[r].to_string());
        record.push(draws.zeta0[r].to_string());
        record.push(draws.zeta1[r].to_string());
        record.push(draws.tau[r].to_string());
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}
