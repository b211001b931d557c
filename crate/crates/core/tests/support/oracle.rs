//! Reference normal CDF and quantile built only from series expansions.
//!
//! `erf` uses its Maclaurin series for |x| < 3 and the Laplace continued
//! fraction for `erfc` beyond; the quantile is plain bisection on that CDF.

#![allow(dead_code)]

const FRAC_2_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;

fn erf_series(x: f64) -> f64 {
    // erf(x) = 2/√π Σ (-1)^k x^(2k+1) / (k! (2k+1))
    let mut term = x;
    let mut sum = x;
    let x2 = x * x;
    for k in 1..200 {
        term *= -x2 / k as f64;
        let add = term / (2 * k + 1) as f64;
        sum += add;
        if add.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    FRAC_2_SQRT_PI * sum
}

/// erfc(x) for x > 0 by backward evaluation of the continued fraction
/// erfc(x) = e^(-x²)/√π · 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + …)))).
fn erfc_fraction(x: f64) -> f64 {
    let mut tail = 0.0;
    for k in (1..400).rev() {
        tail = (k as f64 / 2.0) / (x + tail);
    }
    (-x * x).exp() / std::f64::consts::PI.sqrt() / (x + tail)
}

pub fn erfc(x: f64) -> f64 {
    if x.abs() < 3.0 {
        1.0 - erf_series(x)
    } else if x > 0.0 {
        erfc_fraction(x)
    } else {
        2.0 - erfc_fraction(-x)
    }
}

pub fn cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

pub fn quantile(p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0);
    let (mut lo, mut hi) = (-40.0f64, 40.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-14 {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// 10³ probe probabilities: a uniform midpoint grid plus log-spaced tails.
pub fn probe_points() -> Vec<f64> {
    let mut pts: Vec<f64> = (0..900).map(|k| (k as f64 + 0.5) / 900.0).collect();
    for k in 0..50 {
        let p = 10f64.powf(-10.0 + 8.0 * k as f64 / 49.0);
        pts.push(p);
        pts.push(1.0 - p);
    }
    pts
}
