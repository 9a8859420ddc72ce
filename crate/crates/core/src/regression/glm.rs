use nalgebra::{Cholesky, DMatrix, DVector};
use statrs::distribution::{Continuous, ContinuousCDF, Normal};

use crate::dataset::{expit, Family};
use crate::error::{Error, Result};

const MAX_ITER: usize = 100;
const COEF_TOL: f64 = 1e-8;
const PROB_FLOOR: f64 = 1e-10;

/// IRLS fit of a binary-outcome regression.
#[derive(Debug, Clone)]
pub struct GlmFit {
    pub coefficients: DVector<f64>,
    /// Inverse Fisher information at the final iterate.
    pub coef_cov: DMatrix<f64>,
    pub converged: bool,
    pub n_iter: usize,
}

struct Link {
    normal: Option<Normal>,
}

impl Link {
    fn new(family: Family) -> Self {
        let normal = match family {
            Family::Probit => Some(Normal::standard()),
            _ => None,
        };
        Link { normal }
    }

    /// Mean and derivative dμ/dη at the linear predictor.
    #[inline]
    fn mean_and_slope(&self, eta: f64) -> (f64, f64) {
        match &self.normal {
            None => {
                let mu = expit(eta);
                (mu, mu * (1.0 - mu))
            }
            Some(normal) => (normal.cdf(eta), normal.pdf(eta)),
        }
    }
}

fn log_likelihood(y: &DVector<f64>, mu: &[f64]) -> f64 {
    let mut ll = 0.0;
    for (i, &m) in mu.iter().enumerate() {
        let m = m.clamp(PROB_FLOOR, 1.0 - PROB_FLOOR);
        ll += y[i] * m.ln() + (1.0 - y[i]) * (1.0 - m).ln();
    }
    ll
}

fn weighted_normal_equations(
    design: &DMatrix<f64>,
    w: &[f64],
    z: &[f64],
) -> Result<(Cholesky<f64, nalgebra::Dyn>, DVector<f64>)> {
    let n = design.nrows();
    let q = design.ncols();
    let mut xtwx = DMatrix::zeros(q, q);
    let mut xtwz = DVector::zeros(q);
    for i in 0..n {
        let wi = w[i];
        if wi == 0.0 {
            continue;
        }
        let row = design.row(i);
        for a in 0..q {
            let wa = wi * row[a];
            xtwz[a] += wa * z[i];
            for b in a..q {
                xtwx[(a, b)] += wa * row[b];
            }
        }
    }
    for a in 0..q {
        for b in (a + 1)..q {
            xtwx[(b, a)] = xtwx[(a, b)];
        }
    }
    let chol = Cholesky::new(xtwx).ok_or(Error::CholeskyFailure)?;
    Ok((chol, xtwz))
}

/// Fisher scoring with step-halving. Converged means the max absolute
/// coefficient change fell below 1e-8 within 100 iterations; running out
/// of iterations returns the last iterate with `converged = false`.
pub fn fit_glm(design: &DMatrix<f64>, y: &DVector<f64>, family: Family) -> Result<GlmFit> {
    debug_assert!(family.is_binary());
    let n = design.nrows();
    let q = design.ncols();
    let link = Link::new(family);

    let mut beta = DVector::zeros(q);
    let mut mu = vec![0.5; n];
    let mut ll = log_likelihood(y, &mu);
    let mut w = vec![0.0; n];
    let mut z = vec![0.0; n];
    let mut converged = false;
    let mut n_iter = 0;

    for iter in 1..=MAX_ITER {
        n_iter = iter;
        let eta = design * &beta;
        let mut degenerate = 0usize;
        for i in 0..n {
            let (m, slope) = link.mean_and_slope(eta[i]);
            if !(PROB_FLOOR..=1.0 - PROB_FLOOR).contains(&m) {
                degenerate += 1;
            }
            let mc = m.clamp(PROB_FLOOR, 1.0 - PROB_FLOOR);
            let slope = slope.max(PROB_FLOOR);
            w[i] = slope * slope / (mc * (1.0 - mc));
            z[i] = eta[i] + (y[i] - m) / slope;
            mu[i] = m;
        }
        if degenerate as f64 >= 0.99 * n as f64 {
            return Err(Error::SeparationDetected { degenerate, n });
        }

        let (chol, xtwz) = weighted_normal_equations(design, &w, &z)?;
        let proposal = chol.solve(&xtwz);

        // Halve the step while the likelihood would decrease.
        let full_step = &proposal - &beta;
        let mut scale = 1.0;
        let mut candidate = proposal;
        let mut cand_mu = vec![0.0; n];
        for _ in 0..30 {
            let eta_c = design * &candidate;
            for i in 0..n {
                cand_mu[i] = link.mean_and_slope(eta_c[i]).0;
            }
            let cand_ll = log_likelihood(y, &cand_mu);
            if cand_ll + 1e-12 * (1.0 + ll.abs()) >= ll {
                ll = cand_ll;
                break;
            }
            scale *= 0.5;
            candidate = &beta + &full_step * scale;
        }

        let delta = (&candidate - &beta).amax();
        beta = candidate;
        if delta < COEF_TOL {
            converged = true;
            break;
        }
    }

    // Fisher information at the final iterate.
    let eta = design * &beta;
    for i in 0..n {
        let (m, slope) = link.mean_and_slope(eta[i]);
        let mc = m.clamp(PROB_FLOOR, 1.0 - PROB_FLOOR);
        let slope = slope.max(PROB_FLOOR);
        w[i] = slope * slope / (mc * (1.0 - mc));
        z[i] = 0.0;
    }
    let (chol, _) = weighted_normal_equations(design, &w, &z)?;
    let coef_cov = chol.inverse();

    Ok(GlmFit { coefficients: beta, coef_cov, converged, n_iter })
}
