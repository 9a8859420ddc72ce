use serde::{Deserialize, Serialize};

use crate::simlab::table::CounterfactualTable;

/// A value per treatment arm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArmPair {
    pub t0: f64,
    pub t1: f64,
}

impl ArmPair {
    pub fn avg(&self) -> f64 {
        0.5 * (self.t0 + self.t1)
    }
}

/// Monte-Carlo standard errors matching the shape of [`TrueEffects`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthStandardErrors {
    pub delta: Vec<ArmPair>,
    pub eta: Vec<ArmPair>,
    pub delta_z: ArmPair,
    pub zeta: ArmPair,
    pub tau: f64,
}

/// Ground-truth effects computed as plain means of the defining
/// counterfactual contrasts over all table rows; on a large table these
/// are the oracle values an estimator should recover.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrueEffects {
    pub delta: Vec<ArmPair>,
    pub eta: Vec<ArmPair>,
    pub delta_z: ArmPair,
    pub zeta: ArmPair,
    pub tau: f64,
    pub se: TruthStandardErrors,
    pub n_rows: usize,
}

#[derive(Clone, Copy, Default)]
struct Accumulator {
    sum: f64,
    sum_sq: f64,
}

impl Accumulator {
    #[inline]
    fn add(&mut self, v: f64) {
        self.sum += v;
        self.sum_sq += v * v;
    }

    fn mean(&self, n: usize) -> f64 {
        self.sum / n as f64
    }

    fn standard_error(&self, n: usize) -> f64 {
        let n_f = n as f64;
        let mean = self.sum / n_f;
        let var = ((self.sum_sq - n_f * mean * mean) / (n_f - 1.0)).max(0.0);
        (var / n_f).sqrt()
    }
}

/// Means of the defining contrasts over all rows, e.g.
/// `δ^k(t) = mean[Y(t, M^k(1), W^k(t)) - Y(t, M^k(0), W^k(t))]`,
/// together with their Monte-Carlo standard errors.
pub fn monte_carlo_truth(table: &CounterfactualTable) -> TrueEffects {
    let n = table.n_rows();
    let k = table.n_mediators();
    let gamma = &table.spec().outcome.mediators;
    let beta3 = table.spec().outcome.treatment;
    let alpha3 = table.spec().outcome.intercept;

    let mut acc_delta = vec![[Accumulator::default(); 2]; k];
    let mut acc_eta = vec![[Accumulator::default(); 2]; k];
    let mut acc_delta_z = [Accumulator::default(); 2];
    let mut acc_zeta = [Accumulator::default(); 2];
    let mut acc_tau = Accumulator::default();

    for row in 0..n {
        // γ-weighted mediator sums for the two pure arms, then the four
        // pure-arm outcomes and the per-mediator mixed outcomes.
        let mut base0 = 0.0;
        let mut base1 = 0.0;
        for (a, g) in gamma.iter().enumerate() {
            base0 += g * table.mediator(row, a, 0);
            base1 += g * table.mediator(row, a, 1);
        }
        let y00 = table.finish_outcome(row, alpha3 + base0);
        let y01 = table.finish_outcome(row, alpha3 + base1);
        let y10 = table.finish_outcome(row, alpha3 + beta3 + base0);
        let y11 = table.finish_outcome(row, alpha3 + beta3 + base1);

        acc_tau.add(y11 - y00);
        acc_delta_z[0].add(y01 - y00);
        acc_delta_z[1].add(y11 - y10);
        acc_zeta[0].add(y10 - y00);
        acc_zeta[1].add(y11 - y01);

        for (a, g) in gamma.iter().enumerate() {
            let swap = g * (table.mediator(row, a, 0) - table.mediator(row, a, 1));
            // Y(1, M^a(0), W^a(1)) and Y(0, M^a(1), W^a(0)).
            let y_mixed1 = table.finish_outcome(row, alpha3 + beta3 + base1 + swap);
            let y_mixed0 = table.finish_outcome(row, alpha3 + base0 - swap);
            acc_delta[a][1].add(y11 - y_mixed1);
            acc_eta[a][1].add(y_mixed1 - y10);
            acc_delta[a][0].add(y_mixed0 - y00);
            acc_eta[a][0].add(y01 - y_mixed0);
        }
    }

    let pair = |acc: &[Accumulator; 2]| ArmPair { t0: acc[0].mean(n), t1: acc[1].mean(n) };
    let pair_se =
        |acc: &[Accumulator; 2]| ArmPair { t0: acc[0].standard_error(n), t1: acc[1].standard_error(n) };

    TrueEffects {
        delta: acc_delta.iter().map(pair).collect(),
        eta: acc_eta.iter().map(pair).collect(),
        delta_z: pair(&acc_delta_z),
        zeta: pair(&acc_zeta),
        tau: acc_tau.mean(n),
        se: TruthStandardErrors {
            delta: acc_delta.iter().map(pair_se).collect(),
            eta: acc_eta.iter().map(pair_se).collect(),
            delta_z: pair_se(&acc_delta_z),
            zeta: pair_se(&acc_zeta),
            tau: acc_tau.standard_error(n),
        },
        n_rows: n,
    }
}

impl TrueEffects {
    /// True value of the across-arm average of one tracked effect, keyed
    /// the way study metrics name effects.
    pub fn effect_value(&self, effect: &str) -> Option<f64> {
        if let Some(idx) = effect.strip_prefix("delta_") {
            if let Ok(k) = idx.parse::<usize>() {
                return self.delta.get(k.checked_sub(1)?).map(ArmPair::avg);
            }
        }
        match effect {
            "delta_z" => Some(self.delta_z.avg()),
            "zeta" => Some(self.zeta.avg()),
            "tau" => Some(self.tau),
            _ => None,
        }
    }
}

