use serde::Serialize;

use crate::recovery::SupportEstimate;
use crate::signal_model::SupportSet;
use crate::{CVector, Error, Result};

/// `|Ŝ ∩ S| / |S|` for one user.
pub fn support_hit_ratio(estimate: &SupportEstimate, truth: &SupportSet, user: usize) -> Result<f64> {
    if truth.is_empty() {
        return Err(Error::EmptySupport { user });
    }
    Ok(estimate.intersection_len(truth) as f64 / truth.len() as f64)
}

/// Average support-set cardinality error over `M` trials of `K` users:
/// `1 − (1/(K·M)) Σ_m Σ_k |Ŝ_k^m ∩ S_k^m| / |S_k^m|`.
///
/// `estimates[m][k]` and `truths[m][k]` index trial `m`, user `k`.
pub fn asce(estimates: &[Vec<SupportEstimate>], truths: &[Vec<SupportSet>]) -> Result<f64> {
    if estimates.len() != truths.len() || estimates.is_empty() {
        return Err(Error::Dimension(format!(
            "{} estimate trials vs {} truth trials",
            estimates.len(),
            truths.len()
        )));
    }
    let mut total = 0.0;
    let mut count = 0usize;
    for (est, tru) in estimates.iter().zip(truths) {
        if est.len() != tru.len() {
            return Err(Error::Dimension(format!("{} estimates for {} users", est.len(), tru.len())));
        }
        for (k, (e, t)) in est.iter().zip(tru).enumerate() {
            total += support_hit_ratio(e, t, k)?;
            count += 1;
        }
    }
    Ok(1.0 - total / count as f64)
}

/// `‖ĥ − h‖² / ‖h‖²` for one user.
pub fn relative_error(estimate: &CVector, truth: &CVector, user: usize) -> Result<f64> {
    if estimate.len() != truth.len() {
        return Err(Error::Dimension(format!(
            "user {user}: estimate has {} entries, truth {}",
            estimate.len(),
            truth.len()
        )));
    }
    let denom = truth.norm_squared();
    if denom == 0.0 {
        return Err(Error::ZeroNorm { user });
    }
    Ok((estimate - truth).norm_squared() / denom)
}

/// Mean normalised squared channel error over all given users/trials.
pub fn nmse(estimates: &[CVector], truths: &[CVector]) -> Result<f64> {
    if estimates.len() != truths.len() || estimates.is_empty() {
        return Err(Error::Dimension(format!(
            "{} estimates vs {} truths",
            estimates.len(),
            truths.len()
        )));
    }
    let mut sum = 0.0;
    for (k, (e, t)) in estimates.iter().zip(truths).enumerate() {
        sum += relative_error(e, t, k)?;
    }
    Ok(sum / estimates.len() as f64)
}

/// One aggregated result line.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsRow {
    pub scenario: String,
    pub algorithm: String,
    #[serde(rename = "T")]
    pub t: usize,
    pub snr_tag: String,
    pub asce: f64,
    pub nmse: f64,
    pub bits: u64,
    pub trials: usize,
}

/// Everything a scenario run produced, in deterministic order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MetricsReport {
    pub scenario: String,
    pub rows: Vec<MetricsRow>,
}

impl MetricsReport {
    pub fn get(&self, algorithm: &str, t: usize, snr_tag: &str) -> Option<&MetricsRow> {
        self.rows
            .iter()
            .find(|r| r.algorithm == algorithm && r.t == t && r.snr_tag == snr_tag)
    }

    /// `(T, ASCE)` points of one curve, in sweep order.
    pub fn curve(&self, algorithm: &str, snr_tag: &str) -> Vec<(usize, f64)> {
        self.rows
            .iter()
            .filter(|r| r.algorithm == algorithm && r.snr_tag == snr_tag)
            .map(|r| (r.t, r.asce))
            .collect()
    }

    /// Smallest swept `T` whose ASCE is at most `threshold`.
    pub fn first_t_below(&self, algorithm: &str, snr_tag: &str, threshold: f64) -> Option<usize> {
        self.curve(algorithm, snr_tag)
            .into_iter()
            .filter(|&(_, a)| a <= threshold)
            .map(|(t, _)| t)
            .min()
    }
}
