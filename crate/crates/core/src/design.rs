//! Minimum sample size for a target relative margin of error.
//!
//! The heuristic is
//!
//! ```text
//! n = ⌈ z²/ε² · 1/q · (1/d̄ − 1/M) · D_eff ⌉
//! ```
//!
//! truncated to `[1, M]`.

use serde::{Deserialize, Serialize};

use crate::degree_models::PopulationSpec;
use crate::error::{ensure, Result};
use crate::stats::ZConvention;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StudyDesign {
    /// Relative margin of error.
    pub epsilon: f64,
    pub alpha: f64,
    #[serde(default = "unit")]
    pub design_effect: f64,
    #[serde(default)]
    pub z: ZConvention,
}

fn unit() -> f64 {
    1.0
}

impl StudyDesign {
    pub fn new(epsilon: f64, alpha: f64) -> Result<Self> {
        let d = StudyDesign { epsilon, alpha, design_effect: 1.0, z: ZConvention::Exact };
        d.validate()?;
        Ok(d)
    }

    pub fn with_design_effect(mut self, design_effect: f64) -> Result<Self> {
        self.design_effect = design_effect;
        self.validate()?;
        Ok(self)
    }

    pub fn with_z(mut self, z: ZConvention) -> Self {
        self.z = z;
        self
    }

    pub fn validate(&self) -> Result<()> {
        ensure(self.epsilon > 0.0 && self.epsilon.is_finite(), || {
            format!("epsilon must be positive, got {}", self.epsilon)
        })?;
        ensure(self.alpha > 0.0 && self.alpha < 1.0, || {
            format!("alpha must lie in (0, 1), got {}", self.alpha)
        })?;
        ensure(self.design_effect > 0.0 && self.design_effect.is_finite(), || {
            format!("design effect must be positive, got {}", self.design_effect)
        })
    }
}

/// Result of the heuristic: the truncated count and the value before ceiling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleSize {
    pub n: u64,
    pub raw: f64,
    /// True when the `M` ceiling was binding.
    pub truncated: bool,
}

/// Value of the heuristic before ceiling and truncation.
pub fn raw_sample_size(design: &StudyDesign, pop: &PopulationSpec) -> Result<f64> {
    design.validate()?;
    ensure(pop.q > 0.0 && pop.q <= 1.0, || format!("prevalence must lie in (0, 1], got {}", pop.q))?;
    ensure(pop.m >= 2, || format!("population size must be at least 2, got {}", pop.m))?;
    ensure(pop.d_bar > 0.0 && pop.d_bar <= pop.m as f64, || {
        format!("mean degree must lie in (0, M = {}], got {}", pop.m, pop.d_bar)
    })?;
    let z = design.z.critical_value(design.alpha)?;
    let bracket = 1.0 / pop.d_bar - 1.0 / pop.m as f64;
    Ok(z * z / (design.epsilon * design.epsilon) * (1.0 / pop.q) * bracket * design.design_effect)
}

pub fn min_sample_size(design: &StudyDesign, pop: &PopulationSpec) -> Result<SampleSize> {
    let raw = raw_sample_size(design, pop)?;
    let m = pop.m;
    let ceil = raw.ceil();
    let (n, truncated) = if ceil >= m as f64 { (m, ceil > m as f64) } else { ((ceil as u64).max(1), false) };
    Ok(SampleSize { n, raw, truncated })
}

/// `n / D_eff`.
pub fn effective_sample_size(n: u64, d_eff: f64) -> Result<f64> {
    ensure(n >= 1, || "sample size must be at least 1".into())?;
    ensure(d_eff > 0.0, || format!("design effect must be positive, got {d_eff}"))?;
    Ok(n as f64 / d_eff)
}

/// Minimum sample sizes over a prevalence × mean-degree grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSizeGrid {
    pub m: u64,
    pub q: Vec<f64>,
    pub d_bar: Vec<f64>,
    /// `n[i][j]` is the sample size at `(q[i], d_bar[j])`.
    pub n: Vec<Vec<u64>>,
}

impl SampleSizeGrid {
    /// Long-format rows `(q, d̄, n)`, prevalence-major.
    pub fn long_rows(&self) -> impl Iterator<Item = (f64, f64, u64)> + '_ {
        self.q.iter().enumerate().flat_map(move |(i, &q)| {
            self.d_bar.iter().enumerate().map(move |(j, &d)| (q, d, self.n[i][j]))
        })
    }
}

pub fn sample_size_grid(
    design: &StudyDesign,
    m: u64,
    q_grid: &[f64],
    dbar_grid: &[f64],
) -> Result<SampleSizeGrid> {
    ensure(!q_grid.is_empty() && !dbar_grid.is_empty(), || "grids must be non-empty".into())?;
    let n = q_grid
        .iter()
        .map(|&q| {
            dbar_grid
                .iter()
                .map(|&d_bar| Ok(min_sample_size(design, &PopulationSpec { m, q, d_bar })?.n))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SampleSizeGrid { m, q: q_grid.to_vec(), d_bar: dbar_grid.to_vec(), n })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    fn design_z2() -> StudyDesign {
        StudyDesign::new(0.1, 0.05).unwrap().with_z(ZConvention::Two)
    }

    #[test]
    fn worked_example() {
        // With M large the 1/M term vanishes: 2²/0.1² · 10 · 1/10 = 400.
        let pop = PopulationSpec { m: 1_000_000_000, q: 0.1, d_bar: 10.0 };
        assert_eq!(min_sample_size(&design_z2(), &pop).unwrap().n, 400);
        let pop = PopulationSpec { m: 10_000, q: 0.1, d_bar: 10.0 };
        assert_eq!(min_sample_size(&design_z2(), &pop).unwrap().n, 400);
    }

    #[test]
    fn exact_quantile_example() {
        let pop = PopulationSpec { m: 10_000, q: 0.1, d_bar: 10.0 };
        let s = min_sample_size(&StudyDesign::new(0.1, 0.05).unwrap(), &pop).unwrap();
        assert_eq!(s.n, 384);
        // 1.959964² / 0.01 · 10 · 0.0999
        assert!((s.raw - 383.761_736).abs() < 1e-5, "{}", s.raw);
    }

    #[test]
    fn fully_connected_population_needs_one() {
        let pop = PopulationSpec { m: 500, q: 0.2, d_bar: 500.0 };
        let s = min_sample_size(&design_z2(), &pop).unwrap();
        assert_eq!((s.n, s.raw), (1, 0.0));
    }

    #[test]
    fn kerman_mmt_row() {
        let m = 611_401;
        let pop = PopulationSpec { m, q: 5289.0 / m as f64, d_bar: 235.0 };
        let s = min_sample_size(&StudyDesign::new(0.1, 0.05).unwrap(), &pop).unwrap();
        assert_eq!(s.n, 189);
        assert!((s.n as f64 / 197.0 - 1.0).abs() <= 0.05);
    }

    #[test]
    fn truncation_at_population() {
        let pop = PopulationSpec { m: 10_000, q: 0.001, d_bar: 1.0 };
        let s = min_sample_size(&design_z2(), &pop).unwrap();
        assert_eq!(s.n, 10_000);
        assert!(s.truncated);
    }

    #[test]
    fn domain_errors() {
        let d = StudyDesign::new(0.1, 0.05).unwrap();
        for pop in [
            PopulationSpec { m: 100, q: 0.0, d_bar: 10.0 },
            PopulationSpec { m: 100, q: 1.5, d_bar: 10.0 },
            PopulationSpec { m: 100, q: 0.1, d_bar: 0.0 },
            PopulationSpec { m: 100, q: 0.1, d_bar: 101.0 },
        ] {
            assert!(matches!(min_sample_size(&d, &pop), Err(Error::Domain(_))), "{pop:?}");
        }
        assert!(StudyDesign::new(0.0, 0.05).is_err());
        assert!(StudyDesign::new(0.1, 1.0).is_err());
        assert!(d.with_design_effect(0.0).is_err());
    }

    #[test]
    fn design_effect_scales() {
        let pop = PopulationSpec { m: 10_000, q: 0.1, d_bar: 10.0 };
        let base = raw_sample_size(&design_z2(), &pop).unwrap();
        let d2 = design_z2().with_design_effect(2.0).unwrap();
        let s = min_sample_size(&d2, &pop).unwrap();
        assert_eq!(s.raw, base * 2.0);
        assert_eq!(s.n, (base * 2.0).ceil() as u64);
    }

    #[test]
    fn effective_size() {
        assert_eq!(effective_sample_size(400, 1.0).unwrap(), 400.0);
        assert_eq!(effective_sample_size(400, 2.0).unwrap(), 200.0);
        assert!((effective_sample_size(1554, 1.5).unwrap() - 1036.0).abs() < 1e-12);
        assert!(effective_sample_size(400, 0.0).is_err());
        assert!(effective_sample_size(400, -1.0).is_err());
    }

    #[test]
    fn grid_cells() {
        let g = sample_size_grid(&design_z2(), 10_000, &[0.001, 0.1], &[1.0, 10.0]).unwrap();
        assert_eq!(g.n[1][1], 400);
        assert_eq!(g.n[0][0], 10_000);
        assert_eq!(g.long_rows().count(), 4);
        assert!(sample_size_grid(&design_z2(), 10_000, &[], &[1.0]).is_err());
    }
}
