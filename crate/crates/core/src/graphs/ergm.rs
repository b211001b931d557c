//! Edge–triangle exponential random graph model.
//!
//! The target is `P(G) ∝ exp(θ_e · edges(G) + θ_t · triangles(G))`. The
//! sampler is a Metropolis chain of single-dyad toggles; toggling `{i, j}`
//! changes the edge count by one and the triangle count by the number of
//! common neighbours of `i` and `j`.

use rand::Rng;

use super::bitmatrix::BitMatrix;
use super::Graph;
use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Largest population for which the ERGM sampler is run.
pub const ERGM_MAX_NODES: u64 = 1000;

/// Density of the Erdős–Rényi graph the chain starts from.
pub const ERGM_START_DENSITY: f64 = 0.1;

/// Proposals per chain when none are configured: `10 · M²`.
pub fn default_proposals(m: u64) -> u64 {
    10 * m * m
}

pub(crate) fn check_feasible(m: u64) -> Result<()> {
    if m > ERGM_MAX_NODES {
        return Err(Error::Infeasible(format!(
            "ERGM sampling is limited to M <= {ERGM_MAX_NODES}, got M = {m}"
        )));
    }
    Ok(())
}

/// Runs the toggle chain from an ER(`start_p`) graph.
pub(crate) fn sample<R: Rng + ?Sized>(
    m: usize,
    theta_edge: f64,
    theta_triangle: f64,
    proposals: u64,
    start_p: f64,
    rng: &mut R,
) -> Graph {
    if theta_triangle == 0.0 {
        // Independent dyads: the chain's stationary law is ER(logistic(θ_e)).
        let p = 1.0 / (1.0 + (-theta_edge).exp());
        return super::blocks::erdos_renyi(m, p, rng);
    }
    run_chain(m, theta_edge, theta_triangle, proposals, start_p, rng).into_graph()
}

fn run_chain<R: Rng + ?Sized>(
    m: usize,
    theta_edge: f64,
    theta_triangle: f64,
    proposals: u64,
    start_p: f64,
    rng: &mut R,
) -> BitMatrix {
    let mut adj = BitMatrix::new(m);
    let start = super::blocks::erdos_renyi(m, start_p, rng);
    for i in 0..m {
        for &j in start.neighbors(i) {
            if (j as usize) > i {
                adj.insert(i, j as usize);
            }
        }
    }
    if m < 2 {
        return adj;
    }
    for _ in 0..proposals {
        let i = rng.random_range(0..m);
        let mut j = rng.random_range(0..m - 1);
        if j >= i {
            j += 1;
        }
        let gain = theta_edge + theta_triangle * adj.common(i, j) as f64;
        let log_ratio = if adj.get(i, j) { -gain } else { gain };
        if log_ratio >= 0.0 || rng.random::<f64>() < log_ratio.exp() {
            adj.toggle(i, j);
        }
    }
    adj
}

/// Density reached by one pilot chain.
fn pilot_density(m: usize, theta_edge: f64, theta_triangle: f64, proposals: u64, stream: &RngStream) -> f64 {
    let mut rng = stream.rng();
    let adj = run_chain(m, theta_edge, theta_triangle, proposals, ERGM_START_DENSITY, &mut rng);
    let edges: u64 = (0..m).map(|i| adj.degree(i) as u64).sum::<u64>() / 2;
    edges as f64 / (m as f64 * (m as f64 - 1.0) / 2.0)
}

/// Pilot chains averaged per bisection step.
const PILOTS: u64 = 2;

/// Bisection stops once the pilot mean is this close to the target.
pub const CALIBRATION_TOLERANCE: f64 = 0.005;

/// Outcome of calibrating the edge coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Calibration {
    pub theta_edge: f64,
    /// Mean pilot density at `theta_edge`.
    pub density: f64,
    /// Largest minus smallest pilot density at `theta_edge`.
    pub spread: f64,
}

impl Calibration {
    /// Mean pilot density near `target`, with pilots that agree. Pilots
    /// that disagree mean the chain is switching between phases.
    pub fn converged(&self, target: f64) -> bool {
        (self.density - target).abs() <= CALIBRATION_TOLERANCE && self.spread <= 2.0 * CALIBRATION_TOLERANCE
    }

    fn error(&self, target: f64) -> f64 {
        (self.density - target).abs() + self.spread
    }
}

/// Finds the edge coefficient whose chain ends at `target` density for a
/// given triangle coefficient, by bisection on the mean density of pilot
/// chains of the same length as the sampling chain.
///
/// With no triangle term the answer is exactly `logit(target)` and no pilots
/// are run. When the model has no state near `target` (a positive triangle
/// coefficient makes the chain fall to near-empty or jump to near-complete
/// graphs) the closest coefficient found is returned; check
/// [`Calibration::converged`].
pub fn calibrate_edge(
    m: u64,
    theta_triangle: f64,
    target: f64,
    proposals: u64,
    stream: &RngStream,
) -> Result<Calibration> {
    check_feasible(m)?;
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::domain(format!("target density must lie in (0, 1), got {target}")));
    }
    let logit = (target / (1.0 - target)).ln();
    if theta_triangle == 0.0 {
        return Ok(Calibration { theta_edge: logit, density: target, spread: 0.0 });
    }
    let mu = m as usize;
    // Mean-field guess: each dyad sees about (M - 2) p² common neighbours.
    let guess = logit - theta_triangle * (m as f64 - 2.0) * target * target;
    let mut call = 0u64;
    let mut at = |theta_edge: f64| {
        let pilots: Vec<f64> = (0..PILOTS)
            .map(|_| {
                call += 1;
                pilot_density(mu, theta_edge, theta_triangle, proposals, &stream.child(call))
            })
            .collect();
        let (min, max) = pilots.iter().fold((1.0f64, 0.0f64), |(a, b), &d| (a.min(d), b.max(d)));
        Calibration { theta_edge, density: pilots.iter().sum::<f64>() / PILOTS as f64, spread: max - min }
    };

    let mut lo = at(guess - 2.0);
    let mut hi = at(guess + 2.0);
    for _ in 0..8 {
        if lo.density <= target {
            break;
        }
        hi = lo;
        lo = at(lo.theta_edge - 4.0);
    }
    for _ in 0..8 {
        if hi.density >= target {
            break;
        }
        lo = hi;
        hi = at(hi.theta_edge + 4.0);
    }
    let mut best = if lo.error(target) < hi.error(target) { lo } else { hi };
    for _ in 0..24 {
        if best.converged(target) || hi.theta_edge - lo.theta_edge < 1e-4 {
            break;
        }
        let mid = at(0.5 * (lo.theta_edge + hi.theta_edge));
        if mid.error(target) < best.error(target) {
            best = mid;
        }
        if mid.density < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(best)
}
