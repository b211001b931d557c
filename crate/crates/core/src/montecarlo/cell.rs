//! One factorial cell: graph, labels, sample size, respondents, estimate.

use std::ops::Range;

use rand::seq::index;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::degree_models::{DegreeSample, PopulationSpec};
use crate::design::{min_sample_size, StudyDesign};
use crate::error::{Error, Result};
use crate::estimator::{confidence_interval, interval, nsum_estimate, variance_conservative};
use crate::graphs::{self, node_degrees, Graph, GraphModelSpec};
use crate::rng::RngStream;
use crate::stats::summarize;

use super::{IntervalKind, RespondentPool, SimOptions, SimResult, RESOLVE};


/// Everything about a cell except its level `alpha`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSpec {
    pub model: GraphModelSpec,
    pub m: u64,
    pub q: f64,
    pub epsilon: f64,
    #[serde(default)]
    pub options: SimOptions,
}

/// Result of one replicate at one level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReplicateOutcome {
    /// Density of the replicate's graph.
    pub density: f64,
    pub n: u64,
    pub truncated: bool,
    /// `(relative error, interval covers N)`; `None` for a degenerate replicate.
    pub estimate: Option<(f64, bool)>,
}

/// Simulates a single `(model, M, q, alpha)` cell on `stream`.
pub fn simulate_cell(spec: &CellSpec, alpha: f64, replicates: u64, stream: &RngStream) -> Result<SimResult> {
    let mut rows = simulate_group(spec, &[alpha], replicates, stream)?;
    Ok(rows.remove(0))
}

/// Simulates all levels of a cell group, sharing each replicate's graph
/// across levels. Rows follow the order of `alphas`.
pub fn simulate_group(spec: &CellSpec, alphas: &[f64], replicates: u64, stream: &RngStream) -> Result<Vec<SimResult>> {
    if spec.model.is_infeasible(spec.m) {
        return Ok(alphas.iter().map(|&a| empty_result(spec, a, true)).collect());
    }
    let outcomes = run_replicates(spec, alphas, 0..replicates, stream)?;
    Ok(alphas.iter().enumerate().map(|(k, &a)| aggregate(spec, a, &outcomes[k])).collect())
}

/// Per-level outcomes for the replicates in `range`; `result[k][i]` is
/// replicate `range.start + i` at `alphas[k]`.
pub fn run_replicates(
    spec: &CellSpec,
    alphas: &[f64],
    range: Range<u64>,
    stream: &RngStream,
) -> Result<Vec<Vec<ReplicateOutcome>>> {
    let model = graphs::resolve(&spec.model, spec.m, &stream.child(RESOLVE))?;
    let per_rep: Vec<Vec<ReplicateOutcome>> = range
        .into_par_iter()
        .map(|r| replicate(spec, &model, alphas, &stream.child(r)))
        .collect::<Result<_>>()?;
    Ok((0..alphas.len()).map(|k| per_rep.iter().map(|o| o[k]).collect()).collect())
}

fn replicate(spec: &CellSpec, model: &GraphModelSpec, alphas: &[f64], stream: &RngStream) -> Result<Vec<ReplicateOutcome>> {
    let mut rng = stream.child(0).rng();
    let graph = graphs::sample_resolved(model, spec.m, &mut rng)?;
    let graph = graphs::assign_hidden(graph, spec.q, &mut rng)?;
    let pool: Vec<u32> = match spec.options.respondents {
        RespondentPool::All => (0..spec.m as u32).collect(),
        RespondentPool::NonHidden => (0..spec.m as u32).filter(|&v| !graph.is_hidden(v as usize)).collect(),
    };
    alphas
        .iter()
        .map(|&alpha| {
            let outcome = respond(spec, &graph, &pool, alpha, &stream.child(1).child(alpha.to_bits()))?;
            Ok(ReplicateOutcome { density: graph.density(), ..outcome })
        })
        .collect()
}

fn respond(spec: &CellSpec, graph: &Graph, pool: &[u32], alpha: f64, stream: &RngStream) -> Result<ReplicateOutcome> {
    let degenerate = ReplicateOutcome { density: 0.0, n: 0, truncated: false, estimate: None };
    let d_bar = graph.mean_degree();
    if d_bar == 0.0 || pool.is_empty() {
        return Ok(degenerate);
    }
    let design = StudyDesign::new(spec.epsilon, alpha)?.with_z(spec.options.z);
    let pop = PopulationSpec { m: spec.m, q: spec.q, d_bar };
    let size = min_sample_size(&design, &pop)?;
    let n = size.n.min(pool.len() as u64);
    let truncated = size.truncated || n < size.n;

    let mut rng = stream.rng();
    let chosen = index::sample(&mut rng, pool.len(), n as usize);
    let sample = DegreeSample::from_pairs(chosen.iter().map(|i| node_degrees(graph, pool[i] as usize)))?;

    let sized = ReplicateOutcome { density: 0.0, n, truncated, estimate: None };
    let n_true = graph.hidden_count() as f64;
    let n_hat = match nsum_estimate(&sample, spec.m) {
        Ok(v) => v,
        Err(Error::Degenerate(_)) => return Ok(ReplicateOutcome { estimate: None, ..sized }),
        Err(e) => return Err(e),
    };
    let (lo, hi) = match spec.options.interval {
        IntervalKind::PlugIn => match confidence_interval(n_hat, &sample, spec.m, alpha, spec.options.z) {
            Ok(ci) => ci,
            Err(Error::Degenerate(_)) => return Ok(ReplicateOutcome { estimate: None, ..sized }),
            Err(e) => return Err(e),
        },
        IntervalKind::TrueParameter => {
            let p = d_bar / spec.m as f64;
            let v = if p < 1.0 { variance_conservative(n_true, p, n)? } else { 0.0 };
            interval(n_hat, v, spec.m, alpha, spec.options.z)?
        }
    };
    let rel_err = (n_hat - n_true).abs() / n_true;
    Ok(ReplicateOutcome { estimate: Some((rel_err, lo <= n_true && n_true <= hi)), ..sized })
}

fn empty_result(spec: &CellSpec, alpha: f64, infeasible: bool) -> SimResult {
    SimResult {
        model: spec.model.label().to_string(),
        m: spec.m,
        q: spec.q,
        alpha,
        epsilon: spec.epsilon,
        delta: None,
        n_used: None,
        mean_rel_err: None,
        sd_rel_err: None,
        coverage: None,
        mean_density: None,
        replicates: 0,
        degenerate: 0,
        truncated: 0,
        infeasible,
    }
}

/// Folds replicate outcomes, in order, into a cell result.
pub fn aggregate(spec: &CellSpec, alpha: f64, outcomes: &[ReplicateOutcome]) -> SimResult {
    let mut res = empty_result(spec, alpha, false);
    res.replicates = outcomes.len() as u64;
    res.truncated = outcomes.iter().filter(|o| o.truncated).count() as u64;
    if !outcomes.is_empty() {
        res.mean_density = Some(outcomes.iter().map(|o| o.density).sum::<f64>() / outcomes.len() as f64);
    }
    let sized: Vec<f64> = outcomes.iter().filter(|o| o.n > 0).map(|o| o.n as f64).collect();
    if !sized.is_empty() {
        res.n_used = Some((sized.iter().sum::<f64>() / sized.len() as f64).round() as u64);
    }
    let valid: Vec<(f64, bool)> = outcomes.iter().filter_map(|o| o.estimate).collect();
    res.degenerate = (outcomes.len() - valid.len()) as u64;
    let errs: Vec<f64> = valid.iter().map(|v| v.0).collect();
    if let Ok(s) = summarize(&errs) {
        res.mean_rel_err = Some(s.mean);
        res.sd_rel_err = Some(s.sd);
        res.coverage = Some(valid.iter().filter(|v| v.1).count() as f64 / valid.len() as f64);
    }
    res
}

#[cfg(test)]
mod tests {
    use super::*;

    fn er_cell(m: u64, q: f64) -> CellSpec {
        CellSpec { model: GraphModelSpec::er(), m, q, epsilon: 0.1, options: SimOptions::default() }
    }

    #[test]
    fn split_runs_pool_to_the_same_result() {
        let spec = er_cell(300, 0.1);
        let stream = RngStream::new(42);
        let whole = run_replicates(&spec, &[0.05], 0..40, &stream).unwrap();
        let mut a = run_replicates(&spec, &[0.05], 0..25, &stream).unwrap();
        let b = run_replicates(&spec, &[0.05], 25..40, &stream).unwrap();
        a[0].extend_from_slice(&b[0]);
        assert_eq!(whole, a);
        assert_eq!(aggregate(&spec, 0.05, &whole[0]), aggregate(&spec, 0.05, &a[0]));
    }

    #[test]
    fn group_rows_match_single_cells() {
        let spec = er_cell(300, 0.1);
        let stream = RngStream::new(3);
        let rows = simulate_group(&spec, &[0.2, 0.01], 15, &stream).unwrap();
        assert_eq!(rows[1], simulate_cell(&spec, 0.01, 15, &stream).unwrap());
    }

    #[test]
    fn empty_graph_replicates_are_degenerate() {
        let spec = CellSpec { model: GraphModelSpec::Er { p: 0.0 }, ..er_cell(100, 0.1) };
        let r = simulate_cell(&spec, 0.05, 10, &RngStream::new(1)).unwrap();
        assert_eq!(r.degenerate, 10);
        assert_eq!(r.mean_rel_err, None);
        assert_eq!(r.coverage, None);
    }

    #[test]
    fn complete_graph_is_exact() {
        // Every respondent knows every hidden node except possibly itself.
        let spec = CellSpec { model: GraphModelSpec::Er { p: 1.0 }, ..er_cell(100, 0.2) };
        let r = simulate_cell(&spec, 0.05, 5, &RngStream::new(1)).unwrap();
        assert_eq!(r.n_used, Some(1));
        assert!(r.mean_rel_err.unwrap() < 0.02);
    }

    #[test]
    fn non_hidden_pool_excludes_hidden_nodes() {
        let mut spec = CellSpec { model: GraphModelSpec::Er { p: 1.0 }, ..er_cell(100, 0.2) };
        spec.options.respondents = RespondentPool::NonHidden;
        let r = simulate_cell(&spec, 0.05, 5, &RngStream::new(1)).unwrap();
        // A non-hidden respondent sees all 20 hidden nodes among 99 ties.
        let expect = (100.0 * 20.0 / 99.0 - 20.0) / 20.0;
        assert!((r.mean_rel_err.unwrap() - expect).abs() < 1e-12);
    }
}
