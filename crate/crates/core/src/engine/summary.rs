use crate::engine::effects::{ArmSummary, DrawEffects, EffectEstimates, EffectSummary, MediatorEffects};
use crate::error::{Error, Result};

/// Percentile with linear interpolation between order statistics at
/// position `p·(R-1) + 1` (one-indexed).
pub(crate) fn percentile(sorted: &[f64], p: f64) -> f64 {
    let r = sorted.len();
    debug_assert!(r >= 1);
    let h = p * (r - 1) as f64;
    let lo = h.floor() as usize;
    if lo + 1 >= r {
        return sorted[r - 1];
    }
    let frac = h - lo as f64;
    sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
}

/// Two-sided empirical p-value `2·min(#{x ≤ 0}, #{x ≥ 0})/R`, floored at
/// `2/R` (an empirical p-value of zero is never reported) and capped at 1.
pub(crate) fn empirical_p_value(values: &[f64]) -> f64 {
    let r = values.len() as f64;
    let le = values.iter().filter(|&&v| v <= 0.0).count() as f64;
    let ge = values.iter().filter(|&&v| v >= 0.0).count() as f64;
    (2.0 * le.min(ge) / r).clamp(2.0 / r, 1.0)
}

fn summarize_one(values: &[f64], ci_level: f64) -> EffectSummary {
    let point = values.iter().sum::<f64>() / values.len() as f64;
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let tail = (1.0 - ci_level) / 2.0;
    EffectSummary {
        point,
        ci_low: percentile(&sorted, tail),
        ci_high: percentile(&sorted, 1.0 - tail),
        p_value: empirical_p_value(values),
    }
}

fn average(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| 0.5 * (x + y)).collect()
}

fn summarize_arms(t0: &[f64], t1: &[f64], ci_level: f64) -> ArmSummary {
    ArmSummary {
        t0: summarize_one(t0, ci_level),
        t1: summarize_one(t1, ci_level),
        avg: summarize_one(&average(t0, t1), ci_level),
    }
}

/// Summarizes the empirical draw distributions into point estimates,
/// percentile intervals and p-values.
///
/// Proportions mediated are per-draw ratios `δ̄^k_r / τ_r`; they are only
/// reported when every τ draw has the same sign, otherwise the estimates
/// carry the `degenerate_total_effect` flag and the PM fields are absent.
pub fn summarize(draws: &DrawEffects, ci_level: f64, n_sims: usize, seed: u64) -> Result<EffectEstimates> {
    let r = draws.n_draws();
    if r < 2 {
        return Err(Error::invalid("summarize requires at least two draws"));
    }
    if !(0.5..1.0).contains(&ci_level) || ci_level == 0.5 {
        return Err(Error::invalid("ci_level must lie in (0.5, 1)"));
    }
    if !draws.all_finite() {
        return Err(Error::invalid("draw effects contain non-finite values"));
    }
    let lengths_ok = draws.delta_z0.len() == r
        && draws.delta_z1.len() == r
        && draws.zeta0.len() == r
        && draws.zeta1.len() == r
        && draws
            .delta0
            .iter()
            .chain(&draws.delta1)
            .chain(&draws.eta0)
            .chain(&draws.eta1)
            .all(|v| v.len() == r);
    if !lengths_ok {
        return Err(Error::invalid("draw effect vectors have inconsistent lengths"));
    }

    let degenerate = draws.tau.iter().any(|&t| t >= 0.0) && draws.tau.iter().any(|&t| t <= 0.0);

    let per_mediator = (0..draws.n_mediators())
        .map(|k| {
            let delta = summarize_arms(&draws.delta0[k], &draws.delta1[k], ci_level);
            let pm = if degenerate {
                None
            } else {
                let ratios: Vec<f64> = average(&draws.delta0[k], &draws.delta1[k])
                    .iter()
                    .zip(&draws.tau)
                    .map(|(d, t)| d / t)
                    .collect();
                Some(summarize_one(&ratios, ci_level))
            };
            MediatorEffects { delta, pm }
        })
        .collect();

    let pm_z = if degenerate {
        None
    } else {
        let ratios: Vec<f64> = average(&draws.delta_z0, &draws.delta_z1)
            .iter()
            .zip(&draws.tau)
            .map(|(d, t)| d / t)
            .collect();
        Some(summarize_one(&ratios, ci_level))
    };

    Ok(EffectEstimates {
        per_mediator,
        delta_z: summarize_arms(&draws.delta_z0, &draws.delta_z1, ci_level),
        zeta: summarize_arms(&draws.zeta0, &draws.zeta1, ci_level),
        tau: summarize_one(&draws.tau, ci_level),
        pm_z,
        degenerate_total_effect: degenerate,
        n_draws: r,
        n_sims,
        ci_level,
        seed,
    })
}
