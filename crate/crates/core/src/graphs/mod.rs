//! Random population graphs with a labelled hidden subpopulation.
//!
//! Five base models are provided (Erdős–Rényi, edge–triangle ERGM,
//! preferential attachment, stochastic block model and small-world) plus
//! four families indexed by `δ ∈ [0, 1]` that move away from ER(p) as `δ`
//! grows. Every generator returns an undirected simple graph stored as
//! sorted neighbour lists.

mod bitmatrix;
mod blocks;
pub mod ergm;
mod fenwick;
mod pa;
mod small_world;

use std::io::{self, Write};

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::degree_models::DegreeSample;
use crate::error::{ensure, Error, Result};
use crate::rng::RngStream;

pub use ergm::{calibrate_edge, default_proposals, Calibration, CALIBRATION_TOLERANCE, ERGM_MAX_NODES};

/// Undirected simple graph with hidden-population labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<u32>>,
    hidden: Vec<bool>,
}

impl Graph {
    /// Lists must already be sorted, symmetric and loop-free.
    pub(crate) fn from_sorted_lists(adj: Vec<Vec<u32>>) -> Self {
        let hidden = vec![false; adj.len()];
        let g = Graph { adj, hidden };
        debug_assert!(g.audit().is_ok());
        g
    }

    /// Builds a graph from an edge list; rejects loops and duplicates.
    pub fn from_edges(m: usize, edges: &[(u32, u32)]) -> Result<Self> {
        let mut adj = vec![Vec::new(); m];
        for &(u, v) in edges {
            ensure((u as usize) < m && (v as usize) < m, || {
                format!("edge ({u}, {v}) references a node outside 0..{m}")
            })?;
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        let g = Graph { hidden: vec![false; m], adj };
        g.audit()?;
        Ok(g)
    }

    pub(crate) fn into_lists(self) -> Vec<Vec<u32>> {
        self.adj
    }

    pub fn num_nodes(&self) -> usize {
        self.adj.len()
    }

    pub fn num_edges(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn mean_degree(&self) -> f64 {
        2.0 * self.num_edges() as f64 / self.num_nodes() as f64
    }

    pub fn density(&self) -> f64 {
        let m = self.num_nodes() as f64;
        self.num_edges() as f64 / (m * (m - 1.0) / 2.0)
    }

    pub fn is_hidden(&self, v: usize) -> bool {
        self.hidden[v]
    }

    pub fn hidden(&self) -> &[bool] {
        &self.hidden
    }

    pub fn hidden_count(&self) -> usize {
        self.hidden.iter().filter(|&&h| h).count()
    }

    /// Checks for self-loops, parallel edges and asymmetry.
    pub fn audit(&self) -> Result<()> {
        for (v, list) in self.adj.iter().enumerate() {
            for w in list.windows(2) {
                ensure(w[0] < w[1], || format!("node {v}: neighbour list not strictly increasing"))?;
            }
            for &u in list {
                ensure(u as usize != v, || format!("self-loop at node {v}"))?;
                ensure(self.adj[u as usize].binary_search(&(v as u32)).is_ok(), || {
                    format!("edge ({v}, {u}) has no reverse entry")
                })?;
            }
        }
        Ok(())
    }

    /// Writes one `u v` line per edge with `u < v`, 0-indexed.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> io::Result<()> {
        for (v, list) in self.adj.iter().enumerate() {
            for &u in list.iter().filter(|&&u| u as usize > v) {
                writeln!(out, "{v} {u}")?;
            }
        }
        Ok(())
    }
}

/// Edge coefficient of the ERGM: given outright or calibrated to a density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EdgeCoefficient {
    Fixed(f64),
    Calibrated { calibrate_density: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeviationFamily {
    /// ER core on `⌊M(1−δ)⌋` nodes, the rest attached preferentially.
    PaMixture,
    /// Two equal blocks, `p(1+δ)` within and `p(1−δ)` between.
    #[serde(rename = "sbm_2block")]
    Sbm2Block,
    /// ERGM with triangle coefficient `+δ`.
    ErgmPlus,
    /// ERGM with triangle coefficient `−δ`.
    ErgmMinus,
}

impl DeviationFamily {
    pub const ALL: [DeviationFamily; 4] = [
        DeviationFamily::PaMixture,
        DeviationFamily::Sbm2Block,
        DeviationFamily::ErgmPlus,
        DeviationFamily::ErgmMinus,
    ];

    pub fn label(self) -> &'static str {
        match self {
            DeviationFamily::PaMixture => "PA-mixture",
            DeviationFamily::Sbm2Block => "SBM-2block",
            DeviationFamily::ErgmPlus => "ERGM-plus",
            DeviationFamily::ErgmMinus => "ERGM-minus",
        }
    }

    pub fn is_ergm(self) -> bool {
        matches!(self, DeviationFamily::ErgmPlus | DeviationFamily::ErgmMinus)
    }
}

pub const DEFAULT_PA_POWER: f64 = 1.4;
pub const DEFAULT_DENSITY: f64 = 0.1;
pub const DEFAULT_TRIANGLE: f64 = -0.4;

fn default_pa_power() -> f64 {
    DEFAULT_PA_POWER
}

fn default_density() -> f64 {
    DEFAULT_DENSITY
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphModelSpec {
    Er {
        p: f64,
    },
    Ergm {
        theta_edge: EdgeCoefficient,
        theta_triangle: f64,
        /// Defaults to `10 · M²`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        proposals: Option<u64>,
    },
    Pa {
        #[serde(default = "default_pa_power")]
        power: f64,
        /// Defaults to `M / 20`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        m_per_step: Option<u64>,
    },
    Sbm {
        block_fractions: Vec<f64>,
        block_matrix: Vec<Vec<f64>>,
    },
    SmallWorld {
        nei: u64,
        p_rewire: f64,
    },
    /// Concrete form of the PA-mixture deviation family.
    PaMixture {
        delta: f64,
        #[serde(default = "default_density")]
        base_p: f64,
        #[serde(default = "default_pa_power")]
        power: f64,
    },
    Deviation {
        family: DeviationFamily,
        delta: f64,
        #[serde(default = "default_density")]
        base_p: f64,
    },
}

impl GraphModelSpec {
    pub fn er() -> Self {
        GraphModelSpec::Er { p: DEFAULT_DENSITY }
    }

    /// Triangle coefficient −0.4 with the edge coefficient calibrated to 10%
    /// density. At `M = 1000` a coefficient of −0.5 or below has no
    /// triangle-sparse state that dense; the chain jumps to a near-bipartite
    /// graph instead.
    pub fn ergm() -> Self {
        GraphModelSpec::Ergm {
            theta_edge: EdgeCoefficient::Calibrated { calibrate_density: DEFAULT_DENSITY },
            theta_triangle: DEFAULT_TRIANGLE,
            proposals: None,
        }
    }

    pub fn pa() -> Self {
        GraphModelSpec::Pa { power: DEFAULT_PA_POWER, m_per_step: None }
    }

    pub fn sbm() -> Self {
        GraphModelSpec::Sbm {
            block_fractions: vec![1.0 / 3.0; 3],
            block_matrix: vec![
                vec![0.18, 0.15, 0.10],
                vec![0.15, 0.12, 0.05],
                vec![0.10, 0.05, 0.02],
            ],
        }
    }

    pub fn small_world() -> Self {
        GraphModelSpec::SmallWorld { nei: 50, p_rewire: 0.1 }
    }

    /// The five base models at their default parameters.
    pub fn base_models() -> Vec<Self> {
        vec![Self::er(), Self::ergm(), Self::pa(), Self::sbm(), Self::small_world()]
    }

    pub fn label(&self) -> &'static str {
        match self {
            GraphModelSpec::Er { .. } => "ER",
            GraphModelSpec::Ergm { .. } => "ERGM",
            GraphModelSpec::Pa { .. } => "PA",
            GraphModelSpec::Sbm { .. } => "SBM",
            GraphModelSpec::SmallWorld { .. } => "small-world",
            GraphModelSpec::PaMixture { .. } => DeviationFamily::PaMixture.label(),
            GraphModelSpec::Deviation { family, .. } => family.label(),
        }
    }

    /// True for models whose sampler cannot run at population size `m`.
    pub fn is_infeasible(&self, m: u64) -> bool {
        let ergm = match self {
            GraphModelSpec::Ergm { .. } => true,
            GraphModelSpec::Deviation { family, .. } => family.is_ergm(),
            _ => false,
        };
        ergm && m > ERGM_MAX_NODES
    }

    pub fn validate(&self, m: u64) -> Result<()> {
        ensure(m >= 2, || format!("graphs need at least 2 nodes, got {m}"))?;
        if self.is_infeasible(m) {
            ergm::check_feasible(m)?;
        }
        let prob = |name: &str, p: f64| {
            ensure((0.0..=1.0).contains(&p), || format!("{name} must lie in [0, 1], got {p}"))
        };
        let unit_delta = |d: f64| ensure((0.0..=1.0).contains(&d), || format!("delta must lie in [0, 1], got {d}"));
        match self {
            GraphModelSpec::Er { p } => prob("p", *p),
            GraphModelSpec::Ergm { theta_edge, theta_triangle, .. } => {
                ensure(theta_triangle.is_finite(), || "theta_triangle must be finite".into())?;
                match theta_edge {
                    EdgeCoefficient::Fixed(t) => {
                        ensure(t.is_finite(), || "theta_edge must be finite".into())
                    }
                    EdgeCoefficient::Calibrated { calibrate_density: d } => ensure(*d > 0.0 && *d < 1.0, || {
                        format!("calibration density must lie in (0, 1), got {d}")
                    }),
                }
            }
            GraphModelSpec::Pa { power, m_per_step } => {
                ensure(*power > 0.0, || format!("attachment power must be positive, got {power}"))?;
                let k = m_per_step.unwrap_or_else(|| pa_default_step(m));
                ensure(k >= 1 && k < m, || format!("m_per_step must lie in [1, M), got {k}"))
            }
            GraphModelSpec::Sbm { block_fractions, block_matrix } => {
                let k = block_fractions.len();
                ensure(k >= 1, || "at least one block is required".into())?;
                ensure(block_fractions.iter().all(|f| *f >= 0.0) && block_fractions.iter().sum::<f64>() > 0.0, || {
                    "block fractions must be non-negative with a positive sum".into()
                })?;
                ensure(block_matrix.len() == k && block_matrix.iter().all(|r| r.len() == k), || {
                    format!("block matrix must be {k} x {k}")
                })?;
                for (a, row) in block_matrix.iter().enumerate() {
                    for (b, &pab) in row.iter().enumerate() {
                        prob("block probability", pab)?;
                        ensure(pab == block_matrix[b][a], || "block matrix must be symmetric".into())?;
                    }
                }
                Ok(())
            }
            GraphModelSpec::SmallWorld { nei, p_rewire } => {
                prob("p_rewire", *p_rewire)?;
                ensure(*nei >= 1 && 2 * nei < m, || {
                    format!("small-world needs 1 <= nei and 2 * nei < M, got nei = {nei}, M = {m}")
                })
            }
            GraphModelSpec::PaMixture { delta, base_p, power } => {
                unit_delta(*delta)?;
                prob("base_p", *base_p)?;
                ensure(*power > 0.0, || format!("attachment power must be positive, got {power}"))
            }
            GraphModelSpec::Deviation { family, delta, base_p } => {
                unit_delta(*delta)?;
                ensure(*base_p > 0.0 && *base_p < 1.0, || format!("base_p must lie in (0, 1), got {base_p}"))?;
                if *family == DeviationFamily::Sbm2Block {
                    prob("p(1 + delta)", base_p * (1.0 + delta))?;
                }
                Ok(())
            }
        }
    }

    /// True when the spec can be sampled without further calibration.
    pub fn is_resolved(&self) -> bool {
        !matches!(
            self,
            GraphModelSpec::Deviation { .. }
                | GraphModelSpec::Ergm { theta_edge: EdgeCoefficient::Calibrated { .. }, .. }
        )
    }
}

fn pa_default_step(m: u64) -> u64 {
    (m / 20).max(1)
}

/// Replaces calibrated coefficients and deviation families by concrete specs.
pub fn resolve(spec: &GraphModelSpec, m: u64, stream: &RngStream) -> Result<GraphModelSpec> {
    spec.validate(m)?;
    match spec {
        GraphModelSpec::Ergm {
            theta_edge: EdgeCoefficient::Calibrated { calibrate_density },
            theta_triangle,
            proposals,
        } => {
            let n_prop = proposals.unwrap_or_else(|| ergm::default_proposals(m));
            let c = calibrate_edge(m, *theta_triangle, *calibrate_density, n_prop, stream)?;
            Ok(GraphModelSpec::Ergm {
                theta_edge: EdgeCoefficient::Fixed(c.theta_edge),
                theta_triangle: *theta_triangle,
                proposals: *proposals,
            })
        }
        GraphModelSpec::Deviation { family, delta, base_p } => {
            deviation_spec(*family, *delta, m, *base_p, stream)
        }
        other => Ok(other.clone()),
    }
}

/// Concrete spec for a deviation family at `delta`.
///
/// * PA-mixture: ER(`base_p`) on `⌊M(1−δ)⌋` nodes; the remaining nodes
///   attach preferentially (power 1.4) with `round(base_p · (M + K) / 2)`
///   links each, `K` being the core size, which keeps the expected density at
///   `base_p`. Cores smaller than one step's worth of links are replaced by
///   a clique of that size, so `δ = 1` is the plain PA model.
/// * SBM-2block: two equal blocks, `p(1+δ)` on and `p(1−δ)` off the diagonal.
/// * ERGM±: triangle coefficient `±δ`, edge coefficient calibrated so the
///   chain settles at density `base_p`.
pub fn deviation_spec(
    family: DeviationFamily,
    delta: f64,
    m: u64,
    base_p: f64,
    stream: &RngStream,
) -> Result<GraphModelSpec> {
    GraphModelSpec::Deviation { family, delta, base_p }.validate(m)?;
    Ok(match family {
        DeviationFamily::PaMixture => GraphModelSpec::PaMixture { delta, base_p, power: DEFAULT_PA_POWER },
        DeviationFamily::Sbm2Block => {
            let (on, off) = (base_p * (1.0 + delta), base_p * (1.0 - delta));
            GraphModelSpec::Sbm {
                block_fractions: vec![0.5, 0.5],
                block_matrix: vec![vec![on, off], vec![off, on]],
            }
        }
        DeviationFamily::ErgmPlus | DeviationFamily::ErgmMinus => {
            let theta_triangle = if family == DeviationFamily::ErgmPlus { delta } else { -delta };
            let c = calibrate_edge(m, theta_triangle, base_p, ergm::default_proposals(m), stream)?;
            GraphModelSpec::Ergm {
                theta_edge: EdgeCoefficient::Fixed(c.theta_edge),
                theta_triangle,
                proposals: None,
            }
        }
    })
}

/// Draws a graph from a resolved spec (see [`resolve`]).
pub fn sample_resolved<R: Rng + ?Sized>(spec: &GraphModelSpec, m: u64, rng: &mut R) -> Result<Graph> {
    spec.validate(m)?;
    let mu = m as usize;
    let g = match spec {
        GraphModelSpec::Er { p } => blocks::erdos_renyi(mu, *p, rng),
        GraphModelSpec::Ergm { theta_edge: EdgeCoefficient::Fixed(theta_edge), theta_triangle, proposals } => {
            let proposals = proposals.unwrap_or_else(|| ergm::default_proposals(m));
            ergm::sample(mu, *theta_edge, *theta_triangle, proposals, ergm::ERGM_START_DENSITY, rng)
        }
        GraphModelSpec::Pa { power, m_per_step } => {
            let k = m_per_step.unwrap_or_else(|| pa_default_step(m)) as usize;
            pa::grow(pa::clique(k), mu, *power, k, rng)
        }
        GraphModelSpec::Sbm { block_fractions, block_matrix } => {
            let sizes = blocks::block_sizes(block_fractions, mu);
            blocks::stochastic_block(&sizes, block_matrix, rng)
        }
        GraphModelSpec::SmallWorld { nei, p_rewire } => {
            small_world::watts_strogatz(mu, *nei as usize, *p_rewire, rng)
        }
        GraphModelSpec::PaMixture { delta, base_p, power } => {
            // Guard against 1 - δ landing just below a representable integer.
            let core = ((m as f64 * (1.0 - delta)) + 1e-9).floor() as usize;
            let core = core.min(mu);
            let step = ((base_p * (mu + core) as f64 / 2.0).round() as usize).clamp(1, mu - 1);
            if core == mu {
                blocks::erdos_renyi(mu, *base_p, rng)
            } else if core >= step {
                let seed = blocks::erdos_renyi(core, *base_p, rng);
                pa::grow(seed, mu, *power, step, rng)
            } else {
                pa::grow(pa::clique(step), mu, *power, step, rng)
            }
        }
        unresolved => {
            return Err(Error::Usage(format!(
                "{} spec must be resolved before sampling",
                unresolved.label()
            )))
        }
    };
    Ok(g)
}

/// Resolves `spec` on `stream.child(0)` and samples on `stream.child(1)`.
pub fn generate(spec: &GraphModelSpec, m: u64, stream: &RngStream) -> Result<Graph> {
    let resolved = resolve(spec, m, &stream.child(0))?;
    sample_resolved(&resolved, m, &mut stream.child(1).rng())
}

/// Labels exactly `round(q · M)` nodes hidden, uniformly without replacement.
pub fn assign_hidden<R: Rng + ?Sized>(mut graph: Graph, q: f64, rng: &mut R) -> Result<Graph> {
    ensure(q > 0.0 && q <= 1.0, || format!("prevalence must lie in (0, 1], got {q}"))?;
    let m = graph.num_nodes();
    let k = (q * m as f64).round() as usize;
    ensure(k >= 1, || format!("round(q * M) = 0 for q = {q}, M = {m}"))?;
    graph.hidden.iter_mut().for_each(|h| *h = false);
    for v in index::sample(rng, m, k.min(m)) {
        graph.hidden[v] = true;
    }
    Ok(graph)
}

/// Degree and hidden-neighbour count of every node.
pub fn degrees(graph: &Graph) -> DegreeSample {
    let (d, d_u) = (0..graph.num_nodes()).map(|v| node_degrees(graph, v)).unzip();
    DegreeSample::new(d, d_u).expect("graph has at least one node")
}

/// `(d, d_u)` for one node.
pub fn node_degrees(graph: &Graph, v: usize) -> (u64, u64) {
    let list = graph.neighbors(v);
    let du = list.iter().filter(|&&u| graph.hidden[u as usize]).count();
    (list.len() as u64, du as u64)
}
