//! Cross-checks between the simulation estimator, the analytic formulas
//! and the ground-truth oracle.

use medimux_core::closed_form::{binary_effects, lsem_effects, ClosedFormInputs};
use medimux_core::engine::{estimate_effects, EstimateOptions};
use medimux_core::regression::{fit_mediator_system, fit_outcome};
use medimux_core::simlab::{extract_observed, generate_counterfactual_table, presets, simple_analysis};
use medimux_core::Family;

/// Dual-route check at identical parameter values: with a noise-free
/// outcome equation the outcome coefficients are fitted exactly, and the
/// engine's draw means must agree with the coefficient products computed
/// from the same fits up to the draw-averaging Monte-Carlo error.
#[test]
fn engine_equals_lsem_formula_at_fitted_coefficients() {
    let mut spec = presets::continuous_two_mediator(0.4);
    spec.outcome.noise_sd = 0.0;
    let table = generate_counterfactual_table(&spec, 20_000, 7).unwrap();
    let data = extract_observed(&table, 20_000, 9).unwrap();
    let options = EstimateOptions { n_draws: 400, n_sims: 100, ci_level: 0.95, seed: 11 };
    let est = estimate_effects(&data, Family::Linear, &options).unwrap();

    let med = fit_mediator_system(&data).unwrap();
    let out = fit_outcome(&data, Family::Linear).unwrap();
    let inputs = ClosedFormInputs::from_fits(&med, &out, data.covariates().clone()).unwrap();
    let lsem = lsem_effects(&inputs).unwrap();

    let r = options.n_draws as f64;
    let draw_sd = |v: &[f64]| {
        let mean = v.iter().sum::<f64>() / r;
        (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (r - 1.0)).sqrt()
    };
    let tol_z = 4.0 * draw_sd(&est.draws.delta_z0) / r.sqrt() + 1e-10;
    assert!(
        (est.estimates.delta_z.avg.point - lsem.delta_z).abs() < tol_z,
        "delta_z {} vs formula {} (tol {tol_z})",
        est.estimates.delta_z.avg.point,
        lsem.delta_z
    );
    for k in 0..2 {
        let tol = 4.0 * draw_sd(&est.draws.delta0[k]) / r.sqrt() + 1e-10;
        assert!(
            (est.estimates.per_mediator[k].delta.avg.point - lsem.delta[k]).abs() < tol,
            "delta_{k} vs formula"
        );
    }
}

/// On noisy data the engine's interval should cover the analytic value
/// computed from the generating coefficients.
#[test]
fn engine_covers_lsem_formula_on_noisy_data() {
    use rand::Rng;
    let mut rng = medimux_core::rng::substream(13, &[300]);
    for _ in 0..3 {
        let mut spec = presets::continuous_two_mediator(0.4);
        spec.mediators.slopes = vec![rng.random::<f64>() * 6.0 - 3.0, rng.random::<f64>() * 6.0 - 3.0];
        spec.outcome.mediators = vec![rng.random::<f64>() * 6.0 - 3.0, rng.random::<f64>() * 6.0 - 3.0];
        let table = generate_counterfactual_table(&spec, 100_000, 17).unwrap();
        let data = extract_observed(&table, 100_000, 19).unwrap();
        let options = EstimateOptions { n_draws: 200, n_sims: 500, ci_level: 0.99, seed: 23 };
        let est = estimate_effects(&data, Family::Linear, &options).unwrap();
        let lsem = lsem_effects(&spec.closed_form_inputs(0).unwrap()).unwrap();
        let dz = &est.estimates.delta_z.avg;
        assert!(
            dz.ci_low <= lsem.delta_z && lsem.delta_z <= dz.ci_high,
            "delta_z formula {} outside engine interval [{}, {}]",
            lsem.delta_z,
            dz.ci_low,
            dz.ci_high
        );
    }
}

/// With independent mediators the simple analysis identifies the same
/// indirect effect as the multiple analysis.
#[test]
fn independent_mediators_make_simple_analysis_agree() {
    let spec = presets::continuous_two_mediator(0.0);
    let table = generate_counterfactual_table(&spec, 60_000, 29).unwrap();
    let data = extract_observed(&table, 60_000, 31).unwrap();
    let options = EstimateOptions { n_draws: 300, n_sims: 500, ci_level: 0.95, seed: 37 };
    let multiple = estimate_effects(&data, Family::Linear, &options).unwrap();
    let simple = simple_analysis(&data, 0, Family::Linear, &options).unwrap();
    let a = &multiple.estimates.per_mediator[0].delta.avg;
    let b = &simple.estimates.per_mediator[0].delta.avg;
    // Both intervals are centered on the same estimand; at this sample
    // size they overlap and the points agree within interval width.
    let width = (a.ci_high - a.ci_low).max(b.ci_high - b.ci_low);
    assert!((a.point - b.point).abs() < width, "{} vs {} (width {width})", a.point, b.point);
}

/// Binary outcome: the engine's per-arm estimates should agree with the
/// analytic F_U formulas evaluated at the fitted coefficients.
#[test]
fn engine_matches_binary_formula_at_fitted_parameters() {
    let spec = presets::binary_two_mediator(0.7);
    let table = generate_counterfactual_table(&spec, 50_000, 41).unwrap();
    let data = extract_observed(&table, 50_000, 43).unwrap();

    let med = fit_mediator_system(&data).unwrap();
    let out = fit_outcome(&data, Family::Logit).unwrap();
    let inputs = ClosedFormInputs::from_fits(&med, &out, data.covariates().clone()).unwrap();

    let options = EstimateOptions { n_draws: 150, n_sims: 4000, ci_level: 0.99, seed: 47 };
    let est = estimate_effects(&data, Family::Logit, &options).unwrap();

    for t in [0u8, 1u8] {
        let cf = binary_effects(&inputs, t).unwrap();
        let (dz, zeta) = match t {
            0 => (&est.estimates.delta_z.t0, &est.estimates.zeta.t0),
            _ => (&est.estimates.delta_z.t1, &est.estimates.zeta.t1),
        };
        assert!(
            dz.ci_low <= cf.delta_z && cf.delta_z <= dz.ci_high,
            "t={t}: formula delta_z {} outside [{}, {}]",
            cf.delta_z,
            dz.ci_low,
            dz.ci_high
        );
        assert!(
            zeta.ci_low <= cf.zeta && cf.zeta <= zeta.ci_high,
            "t={t}: formula zeta {} outside [{}, {}]",
            cf.zeta,
            zeta.ci_low,
            zeta.ci_high
        );
        for k in 0..2 {
            let d = match t {
                0 => &est.estimates.per_mediator[k].delta.t0,
                _ => &est.estimates.per_mediator[k].delta.t1,
            };
            assert!(
                d.ci_low <= cf.delta[k] && cf.delta[k] <= d.ci_high,
                "t={t}: formula delta_{k} {} outside [{}, {}]",
                cf.delta[k],
                d.ci_low,
                d.ci_high
            );
        }
    }
}
