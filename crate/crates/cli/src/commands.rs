use std::io::Write;

use medimux_core::closed_form::{binary_effects, lsem_effects};
use medimux_core::engine::estimate_effects;
use medimux_core::simlab::{
    self, cached_monte_carlo_truth, extract_observed, generate_counterfactual_table, run_study,
    simple_analysis, SimFamily, StudyConfig, TrueEffects,
};
use serde::Serialize;

use crate::args::{ClosedFormArgs, MediateArgs, SimulateArgs, StudyArgs, TruthArgs};
use crate::config::{load_model, resolve_cache_dir, RunConfig};
use crate::error::Result;
use crate::ingest::{ingest_csv, ColumnRoles};
use crate::report::{
    emit_json, file_digest, write_draws_csv, Provenance, Report, CLOSED_FORM_SCHEMA, REPORT_SCHEMA,
    STUDY_SCHEMA, TRUTH_SCHEMA,
};

pub fn cmd_mediate(args: &MediateArgs) -> Result<()> {
    let config = RunConfig::resolve(args)?;
    let roles = ColumnRoles {
        treatment: config.treatment.clone(),
        mediators: config.mediators.clone(),
        outcome: config.outcome.clone(),
        covariates: config.covariates.clone(),
    };
    let (data, ingest) = ingest_csv(&config.input, &roles, config.family, &config.boxcox)?;

    let (analysis, simple_mediator, mediator_names, estimation) = match config.simple {
        Some(k) => {
            let estimation = simple_analysis(&data, k - 1, config.family, &config.options)?;
            let name = config.mediators[k - 1].clone();
            ("simple", Some(name.clone()), vec![name], estimation)
        }
        None => {
            let estimation = estimate_effects(&data, config.family, &config.options)?;
            ("multiple", None, config.mediators.clone(), estimation)
        }
    };

    let report = Report {
        schema_version: REPORT_SCHEMA,
        analysis,
        family: config.family.to_string(),
        treatment: config.treatment.clone(),
        outcome: config.outcome.clone(),
        mediators: mediator_names,
        covariates: config.covariates.clone(),
        simple_mediator,
        ingest,
        effects: &estimation.estimates,
        provenance: Provenance {
            version: env!("CARGO_PKG_VERSION"),
            input_digest: file_digest(&config.input)?,
            seed: config.options.seed,
            draws: config.options.n_draws,
            sims: config.options.n_sims,
        },
    };
    emit_json(&report, config.output.as_deref())?;
    if let Some(path) = &config.draws_csv {
        write_draws_csv(&estimation.draws, path)?;
    }
    Ok(())
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<()> {
    let spec = load_model(&args.model)?;
    let table = generate_counterfactual_table(&spec, args.n, args.seed)?;
    let data = extract_observed(&table, args.n, args.seed)?;

    let mut writer = csv::Writer::from_path(&args.output)?;
    let k = data.n_mediators();
    let c = spec.n_covariates();
    let latent_observed = spec.latent.as_ref().is_some_and(|l| l.observed);
    let mut header: Vec<String> = vec!["t".into()];
    header.extend((1..=k).map(|j| format!("m{j}")));
    header.extend((1..=c).map(|j| format!("x{j}")));
    if latent_observed {
        header.push("u".into());
    }
    header.push("y".into());
    writer.write_record(&header)?;
    for i in 0..data.n_rows() {
        let mut record = vec![data.treatment()[i].to_string()];
        for j in 0..k {
            record.push(data.mediators()[(i, j)].to_string());
        }
        for j in 0..data.n_covariates() {
            record.push(data.covariates()[(i, j)].to_string());
        }
        record.push(data.outcome()[i].to_string());
        writer.write_record(&record)?;
    }
    writer.flush()?;

    if args.cache_truth {
        let cache_dir = resolve_cache_dir(args.cache_dir.as_deref());
        let truth =
            cached_monte_carlo_truth(&spec, args.truth_rows, args.seed, cache_dir.as_deref())?;
        // Keep stdout reserved for data; the summary goes to stderr.
        let mut err = std::io::stderr().lock();
        writeln!(
            err,
            "cached ground truth over {} rows: tau = {:.6}",
            truth.n_rows, truth.tau
        )?;
    }
    Ok(())
}

#[derive(Serialize)]
struct TruthReport {
    schema_version: &'static str,
    model_digest: String,
    seed: u64,
    truth: TrueEffects,
}

pub fn cmd_truth(args: &TruthArgs) -> Result<()> {
    let spec = load_model(&args.model)?;
    let cache_dir = resolve_cache_dir(args.cache_dir.as_deref());
    let truth = cached_monte_carlo_truth(&spec, args.rows, args.seed, cache_dir.as_deref())?;
    let report = TruthReport {
        schema_version: TRUTH_SCHEMA,
        model_digest: file_digest(&args.model)?,
        seed: args.seed,
        truth,
    };
    emit_json(&report, args.output.as_deref())
}

#[derive(Serialize)]
struct StudyReport {
    schema_version: &'static str,
    model_digest: String,
    seed: u64,
    runs_per_cell: usize,
    rows: Vec<simlab::CellMetrics>,
}

pub fn cmd_study(args: &StudyArgs) -> Result<()> {
    let spec = load_model(&args.model)?;
    let config = StudyConfig {
        sample_sizes: args.sizes.clone(),
        correlations: args.correlations.clone(),
        runs_per_cell: args.runs,
        n_draws: args.draws,
        n_sims: args.sims,
        ci_level: args.ci,
        master_seed: args.seed,
        truth_rows: args.truth_rows,
        cache_dir: resolve_cache_dir(args.cache_dir.as_deref()),
        ..StudyConfig::new(spec)
    };
    let metrics = run_study(&config)?;

    let mut writer = csv::Writer::from_path(&args.output)?;
    for row in metrics.long_rows() {
        writer.serialize(row)?;
    }
    writer.flush()?;

    if let Some(json_path) = &args.json {
        let report = StudyReport {
            schema_version: STUDY_SCHEMA,
            model_digest: file_digest(&args.model)?,
            seed: args.seed,
            runs_per_cell: args.runs,
            rows: metrics.rows,
        };
        emit_json(&report, Some(json_path))?;
    }
    Ok(())
}

#[derive(Serialize)]
struct ClosedFormArm {
    delta: Vec<f64>,
    delta_z: f64,
    zeta: f64,
}

#[derive(Serialize)]
struct ClosedFormReport {
    schema_version: &'static str,
    model_digest: String,
    family: String,
    t0: ClosedFormArm,
    t1: ClosedFormArm,
    tau: f64,
}

pub fn cmd_closed_form(args: &ClosedFormArgs) -> Result<()> {
    let spec = load_model(&args.model)?;
    let inputs = spec.closed_form_inputs(0)?;
    let (t0, t1) = match spec.outcome.family {
        SimFamily::Linear => {
            let effects = lsem_effects(&inputs)?;
            let arm = ClosedFormArm {
                delta: effects.delta.clone(),
                delta_z: effects.delta_z,
                zeta: effects.zeta,
            };
            let arm_copy = ClosedFormArm {
                delta: effects.delta,
                delta_z: effects.delta_z,
                zeta: effects.zeta,
            };
            (arm, arm_copy)
        }
        SimFamily::Logit => {
            let e0 = binary_effects(&inputs, 0)?;
            let e1 = binary_effects(&inputs, 1)?;
            (
                ClosedFormArm { delta: e0.delta, delta_z: e0.delta_z, zeta: e0.zeta },
                ClosedFormArm { delta: e1.delta, delta_z: e1.delta_z, zeta: e1.zeta },
            )
        }
    };
    let report = ClosedFormReport {
        schema_version: CLOSED_FORM_SCHEMA,
        model_digest: file_digest(&args.model)?,
        family: inputs.family.to_string(),
        tau: t1.delta_z + t0.zeta,
        t0,
        t1,
    };
    emit_json(&report, args.output.as_deref())
}
