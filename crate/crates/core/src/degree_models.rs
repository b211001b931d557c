//! Degree-report generative models.
//!
//! Each respondent reports a personal network size `d` and a count `d_u` of
//! ties into the hidden population. The models differ in how `d_u` relates
//! to `d`: independently binomial (marginal model), hypergeometric or
//! binomial given `d` (conditional models), or with both counts driven by
//! published study means (retrospective model).

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};

/// General population size, hidden prevalence and mean personal network size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PopulationSpec {
    pub m: u64,
    pub q: f64,
    pub d_bar: f64,
}

impl PopulationSpec {
    pub fn new(m: u64, q: f64, d_bar: f64) -> Result<Self> {
        let spec = PopulationSpec { m, q, d_bar };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        ensure(self.m >= 2, || format!("population size must be at least 2, got {}", self.m))?;
        ensure(self.q > 0.0 && self.q <= 1.0, || {
            format!("prevalence must lie in (0, 1], got {}", self.q)
        })?;
        ensure(self.d_bar > 0.0 && self.d_bar <= self.m as f64, || {
            format!("mean degree must lie in (0, M = {}], got {}", self.m, self.d_bar)
        })?;
        let n = self.n_hidden();
        ensure(n >= 1 && n <= self.m, || {
            format!("round(q * M) = {n} is not a valid hidden population size")
        })
    }

    /// `N = round(q · M)`.
    pub fn n_hidden(&self) -> u64 {
        (self.q * self.m as f64).round() as u64
    }

    /// Implied tie probability `p = d̄ / M`.
    pub fn tie_probability(&self) -> f64 {
        self.d_bar / self.m as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DegreeModel {
    /// `d ~ Bin(M-1, p)` and `d_u ~ Bin(N, p)`, independent.
    MarginalBinomial { m: u64, n_hidden: u64, p: f64 },
    /// `d ~ Bin(M-1, p)` and `d_u | d ~ Hypergeometric(M-1, N, d)`; the view
    /// from a respondent outside the hidden population.
    HypergeometricConditional { m: u64, n_hidden: u64, p: f64 },
    /// `d ~ Bin(M-1, p)` and `d_u | d ~ Bin(d, p)`.
    ConditionalBinomial { m: u64, p: f64 },
    /// `d_u | d ~ Bin(d, N/M)` with `d` supplied by the caller.
    Killworth { m: u64, n_hidden: u64 },
    /// `d ~ Bin(M, d̄/M)` and `d_u ~ Bin(N̂, d̄_u/N̂)`, independent.
    RetroBinomial { m: u64, n_hat: u64, d_bar: f64, d_bar_u: f64 },
}

fn check_prob(name: &str, p: f64) -> Result<()> {
    ensure((0.0..=1.0).contains(&p), || format!("{name} must lie in [0, 1], got {p}"))
}

impl DegreeModel {
    pub fn population_size(&self) -> u64 {
        match *self {
            DegreeModel::MarginalBinomial { m, .. }
            | DegreeModel::HypergeometricConditional { m, .. }
            | DegreeModel::ConditionalBinomial { m, .. }
            | DegreeModel::Killworth { m, .. }
            | DegreeModel::RetroBinomial { m, .. } => m,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.population_size();
        ensure(m >= 2, || format!("population size must be at least 2, got {m}"))?;
        match *self {
            DegreeModel::MarginalBinomial { n_hidden, p, .. } => {
                check_prob("p", p)?;
                ensure(n_hidden <= m, || format!("N = {n_hidden} exceeds M = {m}"))
            }
            DegreeModel::HypergeometricConditional { n_hidden, p, .. } => {
                check_prob("p", p)?;
                ensure(n_hidden < m, || {
                    format!("hypergeometric view needs N < M, got N = {n_hidden}, M = {m}")
                })
            }
            DegreeModel::ConditionalBinomial { p, .. } => check_prob("p", p),
            DegreeModel::Killworth { n_hidden, .. } => {
                ensure(n_hidden <= m, || format!("N = {n_hidden} exceeds M = {m}"))
            }
            DegreeModel::RetroBinomial { n_hat, d_bar, d_bar_u, .. } => {
                ensure(n_hat >= 1 && n_hat <= m, || {
                    format!("N_hat must lie in [1, M = {m}], got {n_hat}")
                })?;
                ensure(d_bar >= 0.0 && d_bar <= m as f64, || {
                    format!("d_bar must lie in [0, M = {m}], got {d_bar}")
                })?;
                ensure(d_bar_u >= 0.0 && d_bar_u <= n_hat as f64, || {
                    format!("d_bar_u must lie in [0, N_hat = {n_hat}], got {d_bar_u}")
                })
            }
        }
    }
}

/// Paired degree reports `(d_i, d_i^u)` for `n` respondents.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeSample {
    d: Vec<u64>,
    d_u: Vec<u64>,
}

impl DegreeSample {
    pub fn new(d: Vec<u64>, d_u: Vec<u64>) -> Result<Self> {
        ensure(d.len() == d_u.len(), || {
            format!("degree columns differ in length: {} vs {}", d.len(), d_u.len())
        })?;
        ensure(!d.is_empty(), || "a degree sample needs at least one respondent".into())?;
        Ok(DegreeSample { d, d_u })
    }

    /// Builds a sample from `(d, d_u)` pairs.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (u64, u64)>) -> Result<Self> {
        let (d, d_u) = pairs.into_iter().unzip();
        Self::new(d, d_u)
    }

    pub fn len(&self) -> usize {
        self.d.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d.is_empty()
    }

    pub fn d(&self) -> &[u64] {
        &self.d
    }

    pub fn d_u(&self) -> &[u64] {
        &self.d_u
    }

    pub fn sum_d(&self) -> u64 {
        self.d.iter().sum()
    }

    pub fn sum_d_u(&self) -> u64 {
        self.d_u.iter().sum()
    }

    pub fn mean_d(&self) -> f64 {
        self.sum_d() as f64 / self.len() as f64
    }

    pub fn mean_d_u(&self) -> f64 {
        self.sum_d_u() as f64 / self.len() as f64
    }
}

fn binomial(n: u64, p: f64) -> Result<Binomial> {
    Binomial::new(n, p).map_err(|e| Error::domain(format!("Bin({n}, {p}): {e}")))
}

/// Draws `n` i.i.d. degree pairs from `model`.
///
/// The Killworth model has no distribution for `d`; use
/// [`sample_conditional`] with caller-supplied degrees instead.
pub fn sample_degrees<R: Rng + ?Sized>(
    model: &DegreeModel,
    n: usize,
    rng: &mut R,
) -> Result<DegreeSample> {
    ensure(n >= 1, || "sample size must be at least 1".into())?;
    model.validate()?;
    let (d, d_u) = match *model {
        DegreeModel::MarginalBinomial { m, n_hidden, p } => {
            let bd = binomial(m - 1, p)?;
            let bu = binomial(n_hidden, p)?;
            (0..n).map(|_| (bd.sample(rng), bu.sample(rng))).unzip()
        }
        DegreeModel::HypergeometricConditional { m, p, .. }
        | DegreeModel::ConditionalBinomial { m, p } => {
            let bd = binomial(m - 1, p)?;
            let d: Vec<u64> = (0..n).map(|_| bd.sample(rng)).collect();
            let d_u = conditional_draws(model, &d, rng)?;
            (d, d_u)
        }
        DegreeModel::Killworth { .. } => {
            return Err(Error::Usage(
                "the Killworth model needs caller-supplied degrees; use sample_conditional".into(),
            ))
        }
        DegreeModel::RetroBinomial { m, n_hat, d_bar, d_bar_u } => {
            let bd = binomial(m, d_bar / m as f64)?;
            let bu = binomial(n_hat, d_bar_u / n_hat as f64)?;
            (0..n).map(|_| (bd.sample(rng), bu.sample(rng))).unzip()
        }
    };
    DegreeSample::new(d, d_u)
}

/// Draws `d_u | d` for each supplied degree under a conditional model.
pub fn sample_conditional<R: Rng + ?Sized>(
    model: &DegreeModel,
    d: &[u64],
    rng: &mut R,
) -> Result<DegreeSample> {
    model.validate()?;
    let m = model.population_size();
    if let Some(&bad) = d.iter().find(|&&di| di > m - 1) {
        return Err(Error::domain(format!("degree {bad} exceeds M - 1 = {}", m - 1)));
    }
    let d_u = conditional_draws(model, d, rng)?;
    DegreeSample::new(d.to_vec(), d_u)
}

fn conditional_draws<R: Rng + ?Sized>(
    model: &DegreeModel,
    d: &[u64],
    rng: &mut R,
) -> Result<Vec<u64>> {
    match *model {
        DegreeModel::HypergeometricConditional { m, n_hidden, .. } => {
            Ok(d.iter().map(|&di| urn_draw(m - 1, n_hidden, di, rng)).collect())
        }
        DegreeModel::ConditionalBinomial { p, .. } => {
            d.iter().map(|&di| Ok(binomial(di, p)?.sample(rng))).collect()
        }
        DegreeModel::Killworth { m, n_hidden } => {
            let share = n_hidden as f64 / m as f64;
            d.iter().map(|&di| Ok(binomial(di, share)?.sample(rng))).collect()
        }
        _ => Err(Error::Unsupported(format!("{model:?} has no conditional d_u | d form"))),
    }
}

/// Number of marked balls among `draws` taken without replacement from an urn
/// of `total` balls, `marked` of them marked.
fn urn_draw<R: Rng + ?Sized>(total: u64, marked: u64, draws: u64, rng: &mut R) -> u64 {
    let (mut left, mut marked_left, mut hits) = (total, marked, 0);
    for _ in 0..draws.min(total) {
        if marked_left == 0 {
            break;
        }
        if marked_left == left {
            // Only marked balls remain.
            return hits + (draws.min(total) - (total - left)).min(marked_left);
        }
        if rng.random_range(0..left) < marked_left {
            hits += 1;
            marked_left -= 1;
        }
        left -= 1;
    }
    hits
}

/// Analytic marginal moments of `d` and `d_u`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelMoments {
    pub mean_d: f64,
    pub var_d: f64,
    pub mean_du: f64,
    pub var_du: f64,
}

pub fn model_moments(model: &DegreeModel) -> Result<ModelMoments> {
    model.validate()?;
    let mm = match *model {
        // The hypergeometric conditional induces exactly Bin(N, p) for d_u.
        DegreeModel::MarginalBinomial { m, n_hidden, p }
        | DegreeModel::HypergeometricConditional { m, n_hidden, p } => {
            let (k, n) = ((m - 1) as f64, n_hidden as f64);
            ModelMoments {
                mean_d: k * p,
                var_d: k * p * (1.0 - p),
                mean_du: n * p,
                var_du: n * p * (1.0 - p),
            }
        }
        DegreeModel::ConditionalBinomial { m, p } => {
            let k = (m - 1) as f64;
            ModelMoments {
                mean_d: k * p,
                var_d: k * p * (1.0 - p),
                mean_du: k * p * p,
                // E[Var(d_u | d)] + Var(E[d_u | d]) = k p²(1-p) + p² · k p(1-p)
                var_du: k * p * p * (1.0 - p) * (1.0 + p),
            }
        }
        DegreeModel::Killworth { .. } => {
            return Err(Error::Unsupported(
                "the Killworth model has no marginal degree distribution".into(),
            ))
        }
        DegreeModel::RetroBinomial { m, n_hat, d_bar, d_bar_u } => ModelMoments {
            mean_d: d_bar,
            var_d: d_bar * (1.0 - d_bar / m as f64),
            mean_du: d_bar_u,
            var_du: d_bar_u * (1.0 - d_bar_u / n_hat as f64),
        },
    };
    Ok(mm)
}
