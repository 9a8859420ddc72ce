use approx::assert_abs_diff_eq;
use nalgebra::{DMatrix, DVector};

use super::*;
use crate::regression::{MediatorCoefficients, OutcomeCoefficients};
use crate::test_support::dataset_latent_confounder;

fn model1_point_draw(family: Family, sigma2: DMatrix<f64>) -> ParameterDraw {
    ParameterDraw {
        mediator: MediatorCoefficients {
            alpha2: DVector::from_vec(vec![1.0, 2.0]),
            beta2: DVector::from_vec(vec![4.0, 6.0]),
            xi2: DMatrix::zeros(2, 0),
        },
        outcome: OutcomeCoefficients {
            alpha3: 1.0,
            beta3: 10.0,
            gamma: DVector::from_vec(vec![5.0, 4.0]),
            xi3: DVector::zeros(0),
        },
        sigma2,
        sigma3: 1.0,
        family,
    }
}

#[test]
fn mediators_deterministic_when_sigma2_zero() {
    let draw = model1_point_draw(Family::Linear, DMatrix::zeros(2, 2));
    let mut rng = substream(1, &[0]);
    let sims = simulate_potential_mediators(&draw, &DMatrix::zeros(100, 0), &mut rng).unwrap();
    for i in 0..100 {
        assert_eq!(sims.z1[(i, 0)] - sims.z0[(i, 0)], 4.0);
        assert_eq!(sims.z1[(i, 1)] - sims.z0[(i, 1)], 6.0);
    }
}

#[test]
fn mediator_arm_difference_is_treatment_slope() {
    let sigma2 = DMatrix::from_row_slice(2, 2, &[1.0, 0.7, 0.7, 1.0]);
    let draw = model1_point_draw(Family::Linear, sigma2);
    let mut rng = substream(2, &[0]);
    let i = 100_000;
    let sims = simulate_potential_mediators(&draw, &DMatrix::zeros(i, 0), &mut rng).unwrap();
    let mean_diff_1 = (0..i).map(|r| sims.z1[(r, 0)] - sims.z0[(r, 0)]).sum::<f64>() / i as f64;
    let mean_diff_2 = (0..i).map(|r| sims.z1[(r, 1)] - sims.z0[(r, 1)]).sum::<f64>() / i as f64;
    assert_abs_diff_eq!(mean_diff_1, 4.0, epsilon = 0.03);
    assert_abs_diff_eq!(mean_diff_2, 6.0, epsilon = 0.03);
}

#[test]
fn cross_arm_correlation_matches_sigma2() {
    let rho = 0.7;
    let sigma2 = DMatrix::from_row_slice(2, 2, &[1.0, rho, rho, 1.0]);
    let draw = model1_point_draw(Family::Linear, sigma2);
    let mut rng = substream(3, &[0]);
    let i = 1_000_000;
    let sims = simulate_potential_mediators(&draw, &DMatrix::zeros(i, 0), &mut rng).unwrap();
    // corr(M¹(1), M²(0)) equals the residual correlation because the
    // residual vector is shared across arms.
    let a: Vec<f64> = (0..i).map(|r| sims.z1[(r, 0)]).collect();
    let b: Vec<f64> = (0..i).map(|r| sims.z0[(r, 1)]).collect();
    let mean_a = a.iter().sum::<f64>() / i as f64;
    let mean_b = b.iter().sum::<f64>() / i as f64;
    let mut cov = 0.0;
    let mut var_a = 0.0;
    let mut var_b = 0.0;
    for r in 0..i {
        cov += (a[r] - mean_a) * (b[r] - mean_b);
        var_a += (a[r] - mean_a).powi(2);
        var_b += (b[r] - mean_b).powi(2);
    }
    let corr = cov / (var_a * var_b).sqrt();
    assert_abs_diff_eq!(corr, rho, epsilon = 0.005);
}

#[test]
fn outcomes_without_mediation_shift_by_beta3() {
    let mut draw = model1_point_draw(Family::Linear, DMatrix::zeros(2, 2));
    draw.outcome.gamma.fill(0.0);
    let mediators = DMatrix::from_element(50, 2, 1.0);
    let x = DMatrix::zeros(50, 0);
    let y0 = simulate_potential_outcomes(&draw, 0, &mediators, &x).unwrap();
    let y1 = simulate_potential_outcomes(&draw, 1, &mediators, &x).unwrap();
    for i in 0..50 {
        assert_eq!(y1[i] - y0[i], 10.0);
    }
}

#[test]
fn logit_outcomes_at_zero_predictor_are_half() {
    let mut draw = model1_point_draw(Family::Logit, DMatrix::zeros(2, 2));
    draw.outcome.alpha3 = 0.0;
    draw.outcome.beta3 = 0.0;
    draw.outcome.gamma.fill(0.0);
    let y = simulate_potential_outcomes(&draw, 1, &DMatrix::from_element(10, 2, 3.0), &DMatrix::zeros(10, 0)).unwrap();
    for i in 0..10 {
        assert_eq!(y[i], 0.5);
    }
}

#[test]
fn point_draw_total_effect_is_54() {
    let sigma2 = DMatrix::from_row_slice(2, 2, &[1.0, 0.7, 0.7, 1.0]);
    let draw = model1_point_draw(Family::Linear, sigma2);
    let mut rng = substream(4, &[0]);
    let i = 1_000_000;
    let x = DMatrix::zeros(i, 0);
    let sims = simulate_potential_mediators(&draw, &x, &mut rng).unwrap();
    let y1 = simulate_potential_outcomes(&draw, 1, &sims.z1, &x).unwrap();
    let y0 = simulate_potential_outcomes(&draw, 0, &sims.z0, &x).unwrap();
    let tau = (y1 - y0).sum() / i as f64;
    assert_abs_diff_eq!(tau, 54.0, epsilon = 1e-9);
}

fn constant_draws(value: f64, r: usize) -> DrawEffects {
    DrawEffects {
        delta0: vec![vec![value; r]],
        delta1: vec![vec![value; r]],
        eta0: vec![vec![0.0; r]],
        eta1: vec![vec![0.0; r]],
        delta_z0: vec![value; r],
        delta_z1: vec![value; r],
        zeta0: vec![value; r],
        zeta1: vec![value; r],
        tau: vec![2.0 * value; r],
    }
}

#[test]
fn summarize_constant_draws() {
    let draws = constant_draws(3.0, 50);
    let est = summarize(&draws, 0.95, 10, 1).unwrap();
    assert_eq!(est.tau.point, 6.0);
    assert_eq!(est.tau.ci_low, 6.0);
    assert_eq!(est.tau.ci_high, 6.0);
    assert_eq!(est.tau.p_value, 2.0 / 50.0);
}

#[test]
fn summarize_interpolated_percentiles() {
    let mut draws = constant_draws(1.0, 100);
    draws.tau = (1..=100).map(f64::from).collect();
    let est = summarize(&draws, 0.95, 10, 1).unwrap();
    assert_abs_diff_eq!(est.tau.ci_low, 3.475, epsilon = 1e-12);
    assert_abs_diff_eq!(est.tau.ci_high, 97.525, epsilon = 1e-12);
}

#[test]
fn summarize_symmetric_draws_have_large_p() {
    let mut draws = constant_draws(1.0, 100);
    draws.tau = (0..100).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
    let est = summarize(&draws, 0.95, 10, 1).unwrap();
    assert!(est.tau.p_value >= 0.9);
    assert!(est.degenerate_total_effect);
    assert!(est.pm_z.is_none());
}

#[test]
fn summarize_requires_two_draws() {
    let draws = constant_draws(1.0, 1);
    assert!(summarize(&draws, 0.95, 10, 1).is_err());
}

#[test]
fn estimate_effects_k1_degeneracy() {
    let data = dataset_latent_confounder(800, 61, false).select_mediator(0).unwrap();
    let options = EstimateOptions { n_draws: 50, n_sims: 200, ci_level: 0.95, seed: 5 };
    let result = estimate_effects(&data, Family::Linear, &options).unwrap();
    for r in 0..50 {
        assert_abs_diff_eq!(result.draws.delta0[0][r], result.draws.delta_z0[r], epsilon = 1e-10);
        assert_abs_diff_eq!(result.draws.delta1[0][r], result.draws.delta_z1[r], epsilon = 1e-10);
        assert_abs_diff_eq!(result.draws.eta0[0][r], 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(result.draws.eta1[0][r], 0.0, epsilon = 1e-10);
    }
}

#[test]
fn estimate_effects_per_draw_identities() {
    let data = dataset_latent_confounder(1000, 67, false);
    let options = EstimateOptions { n_draws: 100, n_sims: 500, ci_level: 0.95, seed: 6 };
    let result = estimate_effects(&data, Family::Linear, &options).unwrap();
    assert!(result.draws.max_identity_residual() < 1e-10);
}

#[test]
fn linear_family_has_arm_free_indirect_effects() {
    let data = dataset_latent_confounder(1000, 71, false);
    let options = EstimateOptions { n_draws: 100, n_sims: 300, ci_level: 0.95, seed: 7 };
    let result = estimate_effects(&data, Family::Linear, &options).unwrap();
    for k in 0..2 {
        for r in 0..100 {
            assert_abs_diff_eq!(
                result.draws.delta0[k][r],
                result.draws.delta1[k][r],
                epsilon = 1e-9
            );
        }
    }
}

#[test]
fn estimate_effects_reproducible_and_thread_invariant() {
    let data = dataset_latent_confounder(600, 73, false);
    let options = EstimateOptions { n_draws: 60, n_sims: 100, ci_level: 0.9, seed: 8 };
    let a = estimate_effects(&data, Family::Linear, &options).unwrap();
    let b = estimate_effects(&data, Family::Linear, &options).unwrap();
    assert_eq!(a.estimates, b.estimates);
    assert_eq!(a.draws, b.draws);

    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let c = single.install(|| estimate_effects(&data, Family::Linear, &options).unwrap());
    assert_eq!(a.estimates, c.estimates);
    assert_eq!(a.draws, c.draws);
}

#[test]
fn doubling_sims_moves_estimates_by_monte_carlo_noise() {
    let data = dataset_latent_confounder(1000, 79, false);
    let base = EstimateOptions { n_draws: 200, n_sims: 400, ci_level: 0.95, seed: 9 };
    let double = EstimateOptions { n_sims: 800, ..base };
    let a = estimate_effects(&data, Family::Linear, &base).unwrap();
    let b = estimate_effects(&data, Family::Linear, &double).unwrap();
    // Per-draw θ̂ has simulation sd ~ sd(draws); the point estimate shift
    // from changing I is bounded by a few of those over sqrt(I).
    let sd = {
        let v = &a.draws.delta_z1;
        let mean = v.iter().sum::<f64>() / v.len() as f64;
        (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
    };
    let shift = (a.estimates.delta_z.t1.point - b.estimates.delta_z.t1.point).abs();
    assert!(
        shift < 5.0 * sd / (base.n_sims as f64).sqrt() + 1e-12,
        "shift {shift} too large versus sd {sd}"
    );
}

#[test]
fn estimate_effects_rejects_bad_options() {
    let data = dataset_latent_confounder(100, 83, false);
    let bad_r = EstimateOptions { n_draws: 1, ..Default::default() };
    assert!(estimate_effects(&data, Family::Linear, &bad_r).is_err());
    let bad_i = EstimateOptions { n_sims: 0, ..Default::default() };
    assert!(estimate_effects(&data, Family::Linear, &bad_i).is_err());
    let bad_ci = EstimateOptions { ci_level: 0.4, ..Default::default() };
    assert!(estimate_effects(&data, Family::Linear, &bad_ci).is_err());
}
