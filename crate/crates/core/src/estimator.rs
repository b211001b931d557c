//! The classic scale-up estimator, its variance approximations and the
//! plug-in normal confidence interval.

use serde::{Deserialize, Serialize};

use crate::degree_models::{DegreeModel, DegreeSample};
use crate::error::{ensure, Error, Result};
use crate::stats::ZConvention;

/// Point estimate of the hidden population size with its interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NsumEstimate {
    pub n_hat: f64,
    /// Plug-in variance `v̂ = (N̂/n)(1 - p̂)/p̂`.
    pub variance: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub n: usize,
    pub alpha: f64,
}

/// `N̂ = M · Σd_u / Σd`, capped at `M`.
pub fn nsum_estimate(sample: &DegreeSample, m: u64) -> Result<f64> {
    let sum_d = sample.sum_d();
    if sum_d == 0 {
        return Err(Error::Degenerate("reported degrees sum to zero".into()));
    }
    let raw = m as f64 * (sample.sum_d_u() as f64 / sum_d as f64);
    Ok(raw.min(m as f64))
}

/// Estimate, plug-in variance and interval in one call.
pub fn estimate(
    sample: &DegreeSample,
    m: u64,
    alpha: f64,
    z: ZConvention,
) -> Result<NsumEstimate> {
    let n_hat = nsum_estimate(sample, m)?;
    let variance = plug_in_variance(n_hat, sample, m)?;
    let (ci_lo, ci_hi) = interval(n_hat, variance, m, alpha, z)?;
    Ok(NsumEstimate { n_hat, variance, ci_lo, ci_hi, n: sample.len(), alpha })
}

/// Conservative variance `(N/n)(1 - p)/p` of the estimator under the
/// marginal binomial model with degrees held fixed.
pub fn variance_conservative(n_hidden: f64, p: f64, n: u64) -> Result<f64> {
    ensure(n >= 1, || "sample size must be at least 1".into())?;
    ensure(p > 0.0 && p < 1.0, || format!("p must lie in (0, 1), got {p}"))?;
    ensure(n_hidden > 0.0, || format!("N must be positive, got {n_hidden}"))?;
    Ok(n_hidden / n as f64 * (1.0 - p) / p)
}

/// Means, variances and covariance of a numerator `X` and denominator `Y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentSet {
    pub mu_x: f64,
    pub mu_y: f64,
    pub var_x: f64,
    pub var_y: f64,
    pub cov_xy: f64,
}

impl MomentSet {
    pub fn validate(&self) -> Result<()> {
        ensure(self.var_x >= 0.0 && self.var_y >= 0.0, || "variances must be non-negative".into())?;
        let bound = (self.var_x * self.var_y).sqrt();
        ensure(self.cov_xy.abs() <= bound * (1.0 + 1e-12), || {
            format!("|cov| = {} exceeds sqrt(var_x var_y) = {bound}", self.cov_xy.abs())
        })
    }
}

/// First-order (delta method) variance of `X / Y`.
pub fn variance_taylor_ratio(m: &MomentSet) -> Result<f64> {
    m.validate()?;
    ensure(m.mu_x != 0.0 && m.mu_y != 0.0, || "ratio moments need non-zero means".into())?;
    let r2 = (m.mu_x * m.mu_x) / (m.mu_y * m.mu_y);
    let rel = m.var_x / (m.mu_x * m.mu_x) - 2.0 * m.cov_xy / (m.mu_x * m.mu_y)
        + m.var_y / (m.mu_y * m.mu_y);
    Ok(r2 * rel)
}

/// Taylor approximation of `E[X / Y]` of order 1 or 2.
pub fn mean_taylor(m: &MomentSet, order: u8) -> Result<f64> {
    ensure(m.mu_y != 0.0, || "ratio moments need a non-zero denominator mean".into())?;
    let first = m.mu_x / m.mu_y;
    match order {
        1 => Ok(first),
        2 => Ok(first - m.cov_xy / (m.mu_y * m.mu_y) + m.mu_x * m.var_y / m.mu_y.powi(3)),
        _ => Err(Error::Unsupported(format!("Taylor order {order}; only 1 and 2 exist"))),
    }
}

/// Which term gets linearized when approximating the ratio variance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Linearization {
    /// Delta method on `X / Y`.
    Ratio,
    /// Law of total variance, linearizing only `1 / Y`.
    Reciprocal,
}

/// Rows of the closed-form variance table, all with `d ~ Bin(M-1, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VarianceRow {
    /// `d_u ~ Bin(N, p)` independent of `d`.
    Marginal { m: u64, n_hidden: u64, p: f64 },
    /// `d_u | d ~ Bin(d, p)`.
    ConditionalOnDegree { m: u64, p: f64 },
    /// `d_u | d ~ Bin(N, p)`.
    ConditionalFixedTrials { m: u64, n_hidden: u64, p: f64 },
}

impl VarianceRow {
    /// Row for a degree model, where one exists.
    pub fn from_model(model: &DegreeModel) -> Result<Self> {
        match *model {
            DegreeModel::MarginalBinomial { m, n_hidden, p } => {
                Ok(VarianceRow::Marginal { m, n_hidden, p })
            }
            DegreeModel::ConditionalBinomial { m, p } => {
                Ok(VarianceRow::ConditionalOnDegree { m, p })
            }
            _ => Err(Error::Unsupported(format!("no variance table row for {model:?}"))),
        }
    }
}

/// Closed-form variance of `N̂` for a table row and linearization method.
///
/// The long `Reciprocal` expression for the marginal row is provided as
/// published; nothing else in the crate relies on it.
pub fn variance_table(row: VarianceRow, method: Linearization, n: u64) -> Result<f64> {
    ensure(n >= 1, || "sample size must be at least 1".into())?;
    let nf = n as f64;
    let check_p = |p: f64| ensure(p > 0.0 && p < 1.0, || format!("p must lie in (0, 1), got {p}"));
    match (row, method) {
        (VarianceRow::Marginal { m, n_hidden, p }, method) => {
            check_p(p)?;
            ensure(n_hidden <= m, || format!("N = {n_hidden} exceeds M = {m}"))?;
            let (mf, big_n) = (m as f64, n_hidden as f64);
            let base = big_n / nf * (1.0 - p) / p;
            Ok(match method {
                Linearization::Ratio => base * (1.0 - big_n / mf),
                Linearization::Reciprocal => {
                    base * (nf * p * (mf - big_n) + 2.0 + 1.0 / mf + big_n / (mf * mf))
                }
            })
        }
        (VarianceRow::ConditionalOnDegree { m, p }, Linearization::Reciprocal) => {
            check_p(p)?;
            let mf = m as f64;
            Ok(mf * p * (1.0 - p) * (mf + 1.0 / nf))
        }
        (VarianceRow::ConditionalFixedTrials { m, n_hidden, p }, Linearization::Reciprocal) => {
            check_p(p)?;
            ensure(n_hidden <= m, || format!("N = {n_hidden} exceeds M = {m}"))?;
            let (mf, big_n) = (m as f64, n_hidden as f64);
            Ok(big_n / nf * (1.0 - p) / p * (1.0 + big_n / mf))
        }
        (row, Linearization::Ratio) => {
            Err(Error::Unsupported(format!("{row:?} has no ratio-linearized variance")))
        }
    }
}

/// Plug-in variance with `p̂ = mean(d) / M`.
pub fn plug_in_variance(n_hat: f64, sample: &DegreeSample, m: u64) -> Result<f64> {
    let p_hat = sample.mean_d() / m as f64;
    if p_hat <= 0.0 {
        return Err(Error::Degenerate("mean reported degree is zero".into()));
    }
    Ok((n_hat / sample.len() as f64) * (1.0 - p_hat).max(0.0) / p_hat)
}

/// Normal interval `N̂ ± z_{α/2} √v̂` clamped to `[0, M]`.
pub fn confidence_interval(
    n_hat: f64,
    sample: &DegreeSample,
    m: u64,
    alpha: f64,
    z: ZConvention,
) -> Result<(f64, f64)> {
    let v = plug_in_variance(n_hat, sample, m)?;
    interval(n_hat, v, m, alpha, z)
}

/// `center ± z_{α/2} √variance`, clamped to `[0, M]`.
pub fn interval(center: f64, variance: f64, m: u64, alpha: f64, z: ZConvention) -> Result<(f64, f64)> {
    ensure(variance >= 0.0, || format!("variance must be non-negative, got {variance}"))?;
    let half = z.critical_value(alpha)? * variance.sqrt();
    let mf = m as f64;
    Ok(((center - half).clamp(0.0, mf), (center + half).clamp(0.0, mf)))
}
