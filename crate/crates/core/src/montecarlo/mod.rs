//! Simulation harness: the factorial coverage study over graph models, the
//! deviation sweep, and the retrospective case-study engine.
//!
//! Randomness is keyed by position rather than by execution order. A cell
//! group `(model, M, q)` owns a stream; replicate `r` draws its graph from
//! `group.child(r).child(0)` and its respondents from
//! `group.child(r).child(1).child(alpha bits)`, so the same graph is shared
//! by every `alpha` of a group and any replicate range can be rerun alone.

mod cell;
mod retro;

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};
use crate::graphs::{self, GraphModelSpec};
use crate::stats::ZConvention;

pub use cell::{aggregate, run_replicates, simulate_cell, simulate_group, CellSpec, ReplicateOutcome};
pub use retro::{retro_bias, run_retrospective, CaseStudy, RetroResult, RetroSampling};

use crate::graphs::DeviationFamily;
use crate::rng::RngStream;
use rayon::prelude::*;

pub const DEFAULT_REPLICATES: u64 = 500;

/// Stream label reserved for resolving calibrated graph specs.
pub(crate) const RESOLVE: u64 = u64::MAX;
pub const DEFAULT_RETRO_REPLICATES: u64 = 10_000;

/// Who may be sampled as a respondent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RespondentPool {
    /// Every node, hidden members included.
    #[default]
    All,
    /// Only nodes outside the hidden population.
    NonHidden,
}

/// Variance used for the coverage interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntervalKind {
    /// `(N̂/n)(1 - p̂)/p̂` with `p̂ = mean(d)/M`.
    #[default]
    PlugIn,
    /// `(N/n)(1 - p)/p` with the true `N` and the graph's `p = d̄/M`.
    TrueParameter,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct SimOptions {
    pub respondents: RespondentPool,
    pub interval: IntervalKind,
    pub z: ZConvention,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    #[serde(alias = "M_grid")]
    pub m_grid: Vec<u64>,
    pub q_grid: Vec<f64>,
    pub alpha_grid: Vec<f64>,
    pub epsilon: f64,
    pub models: Vec<GraphModelSpec>,
    #[serde(default = "default_replicates")]
    pub replicates: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub options: SimOptions,
}

fn default_replicates() -> u64 {
    DEFAULT_REPLICATES
}

/// `0.01, 0.03, …, 0.51`, both ends included.
pub fn full_q_grid() -> Vec<f64> {
    (0..26).map(|i| (1 + 2 * i) as f64 / 100.0).collect()
}

impl SimConfig {
    /// The complete factorial grid: five models, three population sizes,
    /// 26 prevalences and four levels.
    pub fn full_grid(seed: u64) -> Self {
        SimConfig {
            m_grid: vec![1000, 5000, 10_000],
            q_grid: full_q_grid(),
            alpha_grid: vec![0.01, 0.05, 0.1, 0.2],
            epsilon: 0.1,
            models: GraphModelSpec::base_models(),
            replicates: DEFAULT_REPLICATES,
            seed,
            options: SimOptions::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        ensure(!self.m_grid.is_empty(), || "M grid is empty".into())?;
        ensure(!self.q_grid.is_empty(), || "q grid is empty".into())?;
        ensure(!self.alpha_grid.is_empty(), || "alpha grid is empty".into())?;
        ensure(!self.models.is_empty(), || "model list is empty".into())?;
        ensure(self.replicates >= 1, || "replicates must be at least 1".into())?;
        ensure(self.epsilon > 0.0 && self.epsilon.is_finite(), || {
            format!("epsilon must be positive, got {}", self.epsilon)
        })?;
        for &q in &self.q_grid {
            ensure(q > 0.0 && q <= 1.0, || format!("prevalence must lie in (0, 1], got {q}"))?;
        }
        for &a in &self.alpha_grid {
            ensure(a > 0.0 && a < 1.0, || format!("alpha must lie in (0, 1), got {a}"))?;
        }
        for &m in &self.m_grid {
            for &q in &self.q_grid {
                ensure((q * m as f64).round() >= 1.0, || format!("round(q * M) = 0 for q = {q}, M = {m}"))?;
            }
            for model in &self.models {
                if !model.is_infeasible(m) {
                    model.validate(m)?;
                }
            }
        }
        Ok(())
    }
}

/// Aggregates for one cell. Infeasible cells and cells whose replicates were
/// all degenerate carry no statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub model: String,
    pub m: u64,
    pub q: f64,
    pub alpha: f64,
    pub epsilon: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    /// Mean per-replicate sample size, rounded.
    pub n_used: Option<u64>,
    pub mean_rel_err: Option<f64>,
    pub sd_rel_err: Option<f64>,
    pub coverage: Option<f64>,
    /// Mean density of the generated graphs.
    pub mean_density: Option<f64>,
    pub replicates: u64,
    pub degenerate: u64,
    /// Replicates where the sample size was capped at the pool size.
    pub truncated: u64,
    pub infeasible: bool,
}

impl SimResult {
    /// Standard error of `mean_rel_err`.
    pub fn mc_std_error(&self) -> Option<f64> {
        let valid = self.replicates - self.degenerate;
        self.sd_rel_err.filter(|_| valid > 0).map(|sd| sd / (valid as f64).sqrt())
    }
}

/// Runs every cell of the factorial grid, ordered by model, then `M`, `q`
/// and `alpha`.
pub fn run_factorial(config: &SimConfig) -> Result<Vec<SimResult>> {
    config.validate()?;
    let root = RngStream::new(config.seed);
    let groups: Vec<(usize, u64, f64)> = (0..config.models.len())
        .flat_map(|i| config.m_grid.iter().flat_map(move |&m| config.q_grid.iter().map(move |&q| (i, m, q))))
        .collect();
    // Calibration is the slow part of a calibrated model, so resolve once per
    // (model, M) rather than once per group.
    let resolved: Vec<Vec<GraphModelSpec>> = config
        .models
        .iter()
        .enumerate()
        .map(|(i, model)| {
            config
                .m_grid
                .iter()
                .map(|&m| {
                    if model.is_infeasible(m) {
                        Ok(model.clone())
                    } else {
                        graphs::resolve(model, m, &root.child(i as u64).child(m).child(RESOLVE))
                    }
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let per_group: Vec<Vec<SimResult>> = groups
        .into_par_iter()
        .map(|(i, m, q)| {
            let stream = root.child(i as u64).child(m).child(q.to_bits());
            let k = config.m_grid.iter().position(|&x| x == m).expect("m is from the grid");
            let spec = CellSpec { model: resolved[i][k].clone(), m, q, epsilon: config.epsilon, options: config.options };
            let mut rows = simulate_group(&spec, &config.alpha_grid, config.replicates, &stream)?;
            rows.iter_mut().for_each(|r| r.model = config.models[i].label().to_string());
            Ok(rows)
        })
        .collect::<Result<_>>()?;
    Ok(per_group.into_iter().flatten().collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    #[serde(default = "sweep_m", alias = "M")]
    pub m: u64,
    #[serde(default = "sweep_q")]
    pub q: f64,
    #[serde(default = "sweep_alpha")]
    pub alpha: f64,
    #[serde(default = "sweep_epsilon")]
    pub epsilon: f64,
    #[serde(default = "sweep_deltas")]
    pub deltas: Vec<f64>,
    #[serde(default = "all_families")]
    pub families: Vec<DeviationFamily>,
    #[serde(default = "sweep_base_p")]
    pub base_p: f64,
    #[serde(default = "default_replicates")]
    pub replicates: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub options: SimOptions,
}

fn sweep_m() -> u64 {
    1000
}
fn sweep_q() -> f64 {
    0.1
}
fn sweep_alpha() -> f64 {
    0.05
}
fn sweep_epsilon() -> f64 {
    0.1
}
fn sweep_base_p() -> f64 {
    0.1
}
fn all_families() -> Vec<DeviationFamily> {
    DeviationFamily::ALL.to_vec()
}

/// `0, 0.1, …, 1`.
pub fn sweep_deltas() -> Vec<f64> {
    (0..=10).map(|i| i as f64 / 10.0).collect()
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            m: sweep_m(),
            q: sweep_q(),
            alpha: sweep_alpha(),
            epsilon: sweep_epsilon(),
            deltas: sweep_deltas(),
            families: all_families(),
            base_p: sweep_base_p(),
            replicates: DEFAULT_REPLICATES,
            seed: 0,
            options: SimOptions::default(),
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        ensure(!self.deltas.is_empty(), || "delta grid is empty".into())?;
        ensure(!self.families.is_empty(), || "family list is empty".into())?;
        ensure(self.replicates >= 1, || "replicates must be at least 1".into())?;
        ensure(self.q > 0.0 && self.q <= 1.0, || format!("prevalence must lie in (0, 1], got {}", self.q))?;
        ensure(self.alpha > 0.0 && self.alpha < 1.0, || format!("alpha must lie in (0, 1), got {}", self.alpha))?;
        ensure(self.epsilon > 0.0 && self.epsilon.is_finite(), || {
            format!("epsilon must be positive, got {}", self.epsilon)
        })?;
        GraphModelSpec::Er { p: self.base_p }.validate(self.m)?;
        for &family in &self.families {
            for &delta in &self.deltas {
                let spec = GraphModelSpec::Deviation { family, delta, base_p: self.base_p };
                if !spec.is_infeasible(self.m) {
                    spec.validate(self.m)?;
                }
            }
        }
        Ok(())
    }
}

/// The ER baseline cell (`delta` unset) followed by one row per
/// `(family, delta)` in configuration order.
///
/// Every cell uses the same replicate streams (common random numbers), so at
/// `delta = 0`, where each family is ER(`base_p`), cells repeat the baseline.
pub fn run_deviation_sweep(config: &SweepConfig) -> Result<Vec<SimResult>> {
    config.validate()?;
    let stream = RngStream::new(config.seed);
    let mut jobs = vec![(GraphModelSpec::Er { p: config.base_p }, None)];
    for &family in &config.families {
        for &delta in &config.deltas {
            jobs.push((GraphModelSpec::Deviation { family, delta, base_p: config.base_p }, Some(delta)));
        }
    }
    let rows: Vec<Vec<SimResult>> = jobs
        .into_par_iter()
        .map(|(model, delta)| {
            let spec = CellSpec { model, m: config.m, q: config.q, epsilon: config.epsilon, options: config.options };
            let mut rows = simulate_group(&spec, &[config.alpha], config.replicates, &stream)?;
            rows.iter_mut().for_each(|r| r.delta = delta);
            Ok(rows)
        })
        .collect::<Result<_>>()?;
    Ok(rows.into_iter().flatten().collect())
}
