use serde::Serialize;

/// Point estimate, percentile interval and two-sided empirical p-value
/// of one effect's draw distribution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EffectSummary {
    pub point: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub p_value: f64,
}

/// Arm-specific summaries plus the across-arm average `(e(0)+e(1))/2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArmSummary {
    pub t0: EffectSummary,
    pub t1: EffectSummary,
    pub avg: EffectSummary,
}

/// Summaries for one mediator: its indirect effect and proportion
/// mediated. The proportion is absent when the total-effect draws cross
/// zero (see `degenerate_total_effect`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MediatorEffects {
    pub delta: ArmSummary,
    pub pm: Option<EffectSummary>,
}

/// Full set of summarized causal effect estimates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EffectEstimates {
    pub per_mediator: Vec<MediatorEffects>,
    pub delta_z: ArmSummary,
    pub zeta: ArmSummary,
    pub tau: EffectSummary,
    pub pm_z: Option<EffectSummary>,
    /// True when the τ draw distribution crosses (or touches) zero, which
    /// makes proportion-mediated intervals unreliable.
    pub degenerate_total_effect: bool,
    pub n_draws: usize,
    pub n_sims: usize,
    pub ci_level: f64,
    pub seed: u64,
}

/// Raw per-replication effect values, the empirical distribution behind
/// [`EffectEstimates`]. Mediator-indexed fields are `[k][r]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DrawEffects {
    pub delta0: Vec<Vec<f64>>,
    pub delta1: Vec<Vec<f64>>,
    pub eta0: Vec<Vec<f64>>,
    pub eta1: Vec<Vec<f64>>,
    pub delta_z0: Vec<f64>,
    pub delta_z1: Vec<f64>,
    pub zeta0: Vec<f64>,
    pub zeta1: Vec<f64>,
    pub tau: Vec<f64>,
}

impl DrawEffects {
    pub fn n_mediators(&self) -> usize {
        self.delta0.len()
    }

    pub fn n_draws(&self) -> usize {
        self.tau.len()
    }

    pub(crate) fn with_capacity(k: usize, r: usize) -> Self {
        DrawEffects {
            delta0: vec![Vec::with_capacity(r); k],
            delta1: vec![Vec::with_capacity(r); k],
            eta0: vec![Vec::with_capacity(r); k],
            eta1: vec![Vec::with_capacity(r); k],
            delta_z0: Vec::with_capacity(r),
            delta_z1: Vec::with_capacity(r),
            zeta0: Vec::with_capacity(r),
            zeta1: Vec::with_capacity(r),
            tau: Vec::with_capacity(r),
        }
    }

    pub fn all_finite(&self) -> bool {
        let per_k = self
            .delta0
            .iter()
            .chain(&self.delta1)
            .chain(&self.eta0)
            .chain(&self.eta1)
            .all(|v| v.iter().all(|x| x.is_finite()));
        per_k
            && [&self.delta_z0, &self.delta_z1, &self.zeta0, &self.zeta1, &self.tau]
                .iter()
                .all(|v| v.iter().all(|x| x.is_finite()))
    }

    /// Largest violation, over all draws, of the exact decomposition
    /// identities: `τ = δ^Z(t) + ζ(1-t)` and
    /// `δ^Z(t) = (1/K)·Σ_k (δ^k(t) + η^k(t))`.
    ///
    /// Shared counterfactual reuse makes these identities hold by
    /// construction, so the returned residual is pure floating-point
    /// noise; it is asserted below 1e-10 across the test suite.
    pub fn max_identity_residual(&self) -> f64 {
        let k = self.n_mediators() as f64;
        let mut worst = 0.0f64;
        for r in 0..self.n_draws() {
            let tau_a = self.delta_z1[r] + self.zeta0[r];
            let tau_b = self.delta_z0[r] + self.zeta1[r];
            worst = worst.max((self.tau[r] - tau_a).abs());
            worst = worst.max((self.tau[r] - tau_b).abs());
            let mut sum0 = 0.0;
            let mut sum1 = 0.0;
            for j in 0..self.n_mediators() {
                sum0 += self.delta0[j][r] + self.eta0[j][r];
                sum1 += self.delta1[j][r] + self.eta1[j][r];
            }
            worst = worst.max((self.delta_z0[r] - sum0 / k).abs());
            worst = worst.max((self.delta_z1[r] - sum1 / k).abs());
        }
        worst
    }
}
