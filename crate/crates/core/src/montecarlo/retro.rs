//! Retrospective engine: how far would a study's own estimate wander if its
//! published means were the truth?

use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::degree_models::{sample_degrees, DegreeModel, PopulationSpec};
use crate::design::{min_sample_size, StudyDesign};
use crate::error::{ensure, Error, Result};
use crate::estimator::nsum_estimate;
use crate::rng::RngStream;
use crate::stats::summarize;

/// Published summary of an NSUM study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseStudy {
    pub name: String,
    pub n_study: u64,
    #[serde(alias = "M")]
    pub m: u64,
    #[serde(alias = "N_hat")]
    pub n_hat: u64,
    pub d_bar: f64,
    pub d_bar_u: f64,
}

impl CaseStudy {
    pub fn new(name: &str, n_study: u64, m: u64, n_hat: u64, d_bar: f64, d_bar_u: f64) -> Result<Self> {
        let case = CaseStudy { name: name.to_string(), n_study, m, n_hat, d_bar, d_bar_u };
        case.validate()?;
        Ok(case)
    }

    pub fn validate(&self) -> Result<()> {
        ensure(self.n_study >= 1 && self.n_study <= self.m, || {
            format!("{}: study size must lie in [1, M], got {}", self.name, self.n_study)
        })?;
        self.model().validate().map_err(|e| Error::Domain(format!("{}: {e}", self.name)))?;
        ensure(self.d_bar > 0.0, || format!("{}: d_bar must be positive", self.name))
    }

    pub fn model(&self) -> DegreeModel {
        DegreeModel::RetroBinomial { m: self.m, n_hat: self.n_hat, d_bar: self.d_bar, d_bar_u: self.d_bar_u }
    }

    /// Seven published NSUM studies of hidden populations.
    pub fn published() -> Vec<CaseStudy> {
        let rows = [
            ("Heroin users in Nebraska", 550, 1_879_321, 368, 604.0, 0.118),
            ("FSW in Taiyuan, China", 7964, 3_454_927, 3866, 137.0, 0.15),
            ("MMT users in Kerman, Iran", 2550, 611_401, 5289, 235.0, 2.03),
            ("FSW in Chongqing, China", 2957, 28_000_000, 31_576, 311.0, 0.077),
            ("MSM in Shanghai, China", 3907, 24_000_000, 36_354, 236.0, 0.159),
            ("HIV+ individuals in US", 1554, 250_000_000, 800_000, 286.0, 0.91),
            ("MSM in Japan", 1500, 62_348_977, 1_789_416, 174.0, 5.09),
        ];
        rows.iter()
            .map(|&(name, n, m, nh, d, du)| CaseStudy { name: name.into(), n_study: n, m, n_hat: nh, d_bar: d, d_bar_u: du })
            .collect()
    }
}

/// How respondent reports are drawn in each replicate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RetroSampling {
    /// `n_study` independent `(d, d_u)` pairs.
    #[default]
    PerRespondent,
    /// The two column sums directly, using `Σ Bin(k, p) = Bin(n·k, p)`.
    /// Same distribution for the estimate, far fewer draws.
    Pooled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetroResult {
    pub name: String,
    /// Mean of `|N̂_rep − N̂| / N̂` over replicates.
    pub rel_err: f64,
    /// Monte Carlo standard error of `rel_err`.
    pub se: f64,
    pub n_min: u64,
    /// Closed-form bias `|M·d̄_u/d̄ − N̂| / N̂`.
    pub bias: f64,
    pub replicates: u64,
    pub degenerate: u64,
}

/// `|M · d̄_u / d̄ − N̂| / N̂`.
pub fn retro_bias(case: &CaseStudy) -> f64 {
    let centre = case.m as f64 * case.d_bar_u / case.d_bar;
    (centre - case.n_hat as f64).abs() / case.n_hat as f64
}

pub fn run_retrospective(
    case: &CaseStudy,
    epsilon: f64,
    alpha: f64,
    replicates: u64,
    sampling: RetroSampling,
    stream: &RngStream,
) -> Result<RetroResult> {
    case.validate()?;
    ensure(replicates >= 1, || "replicates must be at least 1".into())?;
    let design = StudyDesign::new(epsilon, alpha)?;
    let pop = PopulationSpec { m: case.m, q: case.n_hat as f64 / case.m as f64, d_bar: case.d_bar };
    let n_min = min_sample_size(&design, &pop)?.n;

    let model = case.model();
    let pooled = match sampling {
        RetroSampling::Pooled => Some((
            Binomial::new(case.n_study * case.m, case.d_bar / case.m as f64)
                .map_err(|e| Error::Domain(e.to_string()))?,
            Binomial::new(case.n_study * case.n_hat, case.d_bar_u / case.n_hat as f64)
                .map_err(|e| Error::Domain(e.to_string()))?,
        )),
        RetroSampling::PerRespondent => None,
    };
    let truth = case.n_hat as f64;
    let errs: Vec<Option<f64>> = (0..replicates)
        .into_par_iter()
        .map(|r| {
            let mut rng = stream.child(r).rng();
            let est = match &pooled {
                Some((bd, bu)) => {
                    let (sd, su) = (bd.sample(&mut rng), bu.sample(&mut rng));
                    if sd == 0 {
                        return Ok(None);
                    }
                    (case.m as f64 * su as f64 / sd as f64).min(case.m as f64)
                }
                None => {
                    let sample = sample_degrees(&model, case.n_study as usize, &mut rng)?;
                    match nsum_estimate(&sample, case.m) {
                        Ok(v) => v,
                        Err(Error::Degenerate(_)) => return Ok(None),
                        Err(e) => return Err(e),
                    }
                }
            };
            Ok(Some((est - truth).abs() / truth))
        })
        .collect::<Result<_>>()?;
    let valid: Vec<f64> = errs.iter().flatten().copied().collect();
    let s = summarize(&valid).map_err(|_| Error::Degenerate(format!("{}: every replicate was degenerate", case.name)))?;
    Ok(RetroResult {
        name: case.name.clone(),
        rel_err: s.mean,
        se: s.std_error(valid.len()),
        n_min,
        bias: retro_bias(case),
        replicates,
        degenerate: replicates - valid.len() as u64,
    })
}
