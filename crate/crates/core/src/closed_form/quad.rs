//! Adaptive Gauss-Kronrod quadrature on a finite interval.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

// 15-point Kronrod abscissae on [-1, 1] (positive half) and weights, with
// the embedded 7-point Gauss weights. Standard QUADPACK constants, kept
// at full published precision.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// G7/K15 estimate of the integral over [a, b] plus an error estimate
/// (the Gauss/Kronrod discrepancy).
fn gauss_kronrod_15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let x = half * XGK[j];
        let fsum = f(center - x) + f(center + x);
        kronrod += WGK[j] * fsum;
        if j % 2 == 1 {
            gauss += WG[j / 2] * fsum;
        }
    }
    kronrod *= half;
    gauss *= half;
    (kronrod, (kronrod - gauss).abs())
}

struct Segment {
    error: f64,
    value: f64,
    a: f64,
    b: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Adaptive bisection: repeatedly refines the segment with the largest
/// error estimate until the total is below `abs_tol` or the segment count
/// reaches `max_intervals`.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    max_intervals: usize,
) -> Result<f64> {
    let (value, error) = gauss_kronrod_15(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Segment { error, value, a, b });
    let mut total_error = error;

    while total_error > abs_tol && heap.len() < max_intervals {
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        let (lv, le) = gauss_kronrod_15(&f, worst.a, mid);
        let (rv, re) = gauss_kronrod_15(&f, mid, worst.b);
        total_error += le + re - worst.error;
        heap.push(Segment { error: le, value: lv, a: worst.a, b: mid });
        heap.push(Segment { error: re, value: rv, a: mid, b: worst.b });
    }

    if total_error > abs_tol {
        return Err(Error::QuadratureNotConverged {
            tol: abs_tol,
            err: total_error,
            intervals: heap.len(),
        });
    }
    // Sum small-to-large for a touch less rounding.
    let mut values: Vec<f64> = heap.iter().map(|s| s.value).collect();
    values.sort_by(|x, y| x.abs().total_cmp(&y.abs()));
    Ok(values.iter().sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn polynomial_is_exact() {
        let v = integrate(|x| 3.0 * x * x, 0.0, 2.0, 1e-12, 100).unwrap();
        assert_abs_diff_eq!(v, 8.0, epsilon = 1e-12);
    }

    #[test]
    fn peaked_integrand_converges() {
        // Normal density integrates to ~1 over a wide interval.
        let v = integrate(
            |x| (-0.5 * x * x / 1e-4).exp() / (2.0 * std::f64::consts::PI * 1e-4).sqrt(),
            -1.0,
            1.0,
            1e-9,
            2000,
        )
        .unwrap();
        assert_abs_diff_eq!(v, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn subdivision_cap_errors_out() {
        // Inverse square-root edge singularity cannot be resolved with
        // eight segments at this tolerance.
        let r = integrate(|x| 1.0 / x.sqrt(), 0.0, 1.0, 1e-12, 8);
        assert!(matches!(r, Err(Error::QuadratureNotConverged { .. })));
    }
}
