//! Data simulators shared by unit tests.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::dataset::Dataset;
use crate::dataset::expit;
use crate::rng::substream;

/// Continuous-outcome model with a latent confounder loading (2, 3) on the
/// two mediators: T ~ B(0.3), U ~ N(0,1),
/// M¹ = 1 + 4T + 2U + ε, M² = 2 + 6T + 3U + ε,
/// Y = 1 + 10T + 5M¹ + 4M² + ε.
pub fn dataset_latent_confounder(n: usize, seed: u64, include_u: bool) -> Dataset {
    let mut rng = substream(seed, &[42]);
    let mut t = Vec::with_capacity(n);
    let mut m = DMatrix::zeros(n, 2);
    let mut y = DVector::zeros(n);
    let mut x = DMatrix::zeros(n, usize::from(include_u));
    for i in 0..n {
        let ti = if rng.random::<f64>() < 0.3 { 1.0 } else { 0.0 };
        let u: f64 = rng.sample(StandardNormal);
        let e1: f64 = rng.sample(StandardNormal);
        let e2: f64 = rng.sample(StandardNormal);
        let e3: f64 = rng.sample(StandardNormal);
        let m1 = 1.0 + 4.0 * ti + 2.0 * u + e1;
        let m2 = 2.0 + 6.0 * ti + 3.0 * u + e2;
        t.push(ti);
        m[(i, 0)] = m1;
        m[(i, 1)] = m2;
        y[i] = 1.0 + 10.0 * ti + 5.0 * m1 + 4.0 * m2 + e3;
        if include_u {
            x[(i, 0)] = u;
        }
    }
    Dataset::new(t, m, y, x).unwrap()
}

/// Binary-outcome model: T ~ B(0.3), independent unit-variance mediators
/// with means (0.1 + 0.6T, 0.2 + 0.8T), logit outcome
/// -2 + 0.4T + 0.6M¹ + 0.8M².
pub fn dataset_binary(n: usize, seed: u64) -> Dataset {
    let mut rng = substream(seed, &[4]);
    let mut t = Vec::with_capacity(n);
    let mut m = DMatrix::zeros(n, 2);
    let mut y = DVector::zeros(n);
    for i in 0..n {
        let ti = if rng.random::<f64>() < 0.3 { 1.0 } else { 0.0 };
        let m1 = 0.1 + 0.6 * ti + rng.sample::<f64, _>(StandardNormal);
        let m2 = 0.2 + 0.8 * ti + rng.sample::<f64, _>(StandardNormal);
        let p = expit(-2.0 + 0.4 * ti + 0.6 * m1 + 0.8 * m2);
        t.push(ti);
        m[(i, 0)] = m1;
        m[(i, 1)] = m2;
        y[i] = if rng.random::<f64>() < p { 1.0 } else { 0.0 };
    }
    Dataset::new(t, m, y, DMatrix::zeros(n, 0)).unwrap()
}
