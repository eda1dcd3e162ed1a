//! Group-relative advantages, the clipped surrogate, a per-token KL
//! estimator, and the negative-aware velocity guidance used for the
//! generator. Everything here is a pure function of its inputs.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RlMathError {
    #[error("a reward group needs at least 2 rewards, got {0}")]
    GroupTooSmall(usize),
    #[error("reward {index} is not finite: {value}")]
    NonFiniteReward { index: usize, value: f64 },
    #[error("log-probability lists differ in length: {policy} vs {reference}")]
    LengthMismatch { policy: usize, reference: usize },
    #[error("log-probability lists are empty")]
    EmptyLogProbs,
    #[error("vectors differ in dimension: {0:?}")]
    DimensionMismatch(Vec<usize>),
    #[error("probability {0} is outside [0, 1]")]
    ProbabilityOutOfRange(f64),
}

/// Rewards of the `G >= 2` samples drawn for one prompt.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct RewardGroup {
    rewards: Vec<f64>,
}

impl RewardGroup {
    pub fn new(rewards: Vec<f64>) -> Result<Self, RlMathError> {
        if rewards.len() < 2 {
            return Err(RlMathError::GroupTooSmall(rewards.len()));
        }
        if let Some((index, &value)) = rewards.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(RlMathError::NonFiniteReward { index, value });
        }
        Ok(Self { rewards })
    }

    pub fn rewards(&self) -> &[f64] {
        &self.rewards
    }

    pub fn len(&self) -> usize {
        self.rewards.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn mean(&self) -> f64 {
        self.rewards.iter().sum::<f64>() / self.len() as f64
    }

    /// Population standard deviation.
    pub fn std(&self) -> f64 {
        let mu = self.mean();
        (self.rewards.iter().map(|r| (r - mu).powi(2)).sum::<f64>() / self.len() as f64).sqrt()
    }
}

impl TryFrom<Vec<f64>> for RewardGroup {
    type Error = RlMathError;

    fn try_from(v: Vec<f64>) -> Result<Self, Self::Error> {
        Self::new(v)
    }
}

impl From<RewardGroup> for Vec<f64> {
    fn from(g: RewardGroup) -> Self {
        g.rewards
    }
}

/// Below this spread a group carries no preference signal.
pub const DEGENERATE_STD: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Advantages {
    pub values: Vec<f64>,
    pub degenerate: bool,
}

/// `A_i = (r_i − μ) / σ` with σ the population standard deviation. Groups
/// with σ below [`DEGENERATE_STD`] get all-zero advantages and the flag set.
pub fn group_advantages(group: &RewardGroup) -> Advantages {
    let n = group.len() as f64;
    let mu = group.mean();
    let centered: Vec<f64> = group.rewards.iter().map(|r| r - mu).collect();
    // re-center to cancel the rounding error of the first mean
    let residual = centered.iter().sum::<f64>() / n;
    let centered: Vec<f64> = centered.into_iter().map(|c| c - residual).collect();
    let sigma = (centered.iter().map(|c| c * c).sum::<f64>() / n).sqrt();
    if sigma < DEGENERATE_STD {
        return Advantages { values: vec![0.0; group.len()], degenerate: true };
    }
    Advantages { values: centered.into_iter().map(|c| c / sigma).collect(), degenerate: false }
}

/// `min(ρ·A, clip(ρ, 1−ε, 1+ε)·A)`.
pub fn grpo_surrogate(rho: f64, advantage: f64, clip_eps: f64) -> f64 {
    let clipped = rho.clamp(1.0 - clip_eps, 1.0 + clip_eps);
    (rho * advantage).min(clipped * advantage)
}

/// Mean over tokens of `exp(d) − d − 1` with `d = ℓ_ref − ℓ_θ`.
pub fn kl_penalty(logp_policy: &[f64], logp_ref: &[f64]) -> Result<f64, RlMathError> {
    if logp_policy.len() != logp_ref.len() {
        return Err(RlMathError::LengthMismatch { policy: logp_policy.len(), reference: logp_ref.len() });
    }
    if logp_policy.is_empty() {
        return Err(RlMathError::EmptyLogProbs);
    }
    let total: f64 = logp_policy
        .iter()
        .zip(logp_ref)
        .map(|(p, r)| {
            let d = r - p;
            (d.exp() - d - 1.0).max(0.0)
        })
        .sum();
    Ok(total / logp_policy.len() as f64)
}

/// The two β's are independent: one steers the velocity guidance, the other
/// weighs the policy KL term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NftConfig {
    pub beta_guidance: f64,
    pub kl_beta: f64,
}

impl NftConfig {
    pub fn new(beta_guidance: f64, kl_beta: f64) -> Option<Self> {
        let ok = |b: f64| b.is_finite() && b >= 0.0;
        (ok(beta_guidance) && ok(kl_beta)).then_some(Self { beta_guidance, kl_beta })
    }
}

fn check_dims(vs: &[&[f64]]) -> Result<(), RlMathError> {
    if vs.windows(2).any(|w| w[0].len() != w[1].len()) {
        return Err(RlMathError::DimensionMismatch(vs.iter().map(|v| v.len()).collect()));
    }
    Ok(())
}

/// `v⁺ = (1−β)·v_old + β·v_θ`.
pub fn nft_positive_velocity(v_old: &[f64], v_theta: &[f64], beta: f64) -> Result<Vec<f64>, RlMathError> {
    check_dims(&[v_old, v_theta])?;
    Ok(v_old.iter().zip(v_theta).map(|(o, t)| (1.0 - beta) * o + beta * t).collect())
}

/// `v⁻ = (1+β)·v_old − β·v_θ`.
pub fn nft_negative_velocity(v_old: &[f64], v_theta: &[f64], beta: f64) -> Result<Vec<f64>, RlMathError> {
    check_dims(&[v_old, v_theta])?;
    Ok(v_old.iter().zip(v_theta).map(|(o, t)| (1.0 + beta) * o - beta * t).collect())
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum()
}

/// `p·‖v⁺ − v‖² + (1−p)·‖v⁻ − v‖²`.
pub fn nft_loss(v_old: &[f64], v_theta: &[f64], v_target: &[f64], p: f64, beta: f64) -> Result<f64, RlMathError> {
    check_dims(&[v_old, v_theta, v_target])?;
    if !(0.0..=1.0).contains(&p) {
        return Err(RlMathError::ProbabilityOutOfRange(p));
    }
    let pos = nft_positive_velocity(v_old, v_theta, beta)?;
    let neg = nft_negative_velocity(v_old, v_theta, beta)?;
    let mut loss = 0.0;
    if p > 0.0 {
        loss += p * squared_distance(&pos, v_target);
    }
    if p < 1.0 {
        loss += (1.0 - p) * squared_distance(&neg, v_target);
    }
    Ok(loss)
}

/// Within-group min–max scaling; an all-equal group maps to 0.5 everywhere.
pub fn reward_to_probability(group: &RewardGroup) -> Vec<f64> {
    let lo = group.rewards.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = group.rewards.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi - lo < DEGENERATE_STD {
        return vec![0.5; group.len()];
    }
    group.rewards.iter().map(|r| ((r - lo) / (hi - lo)).clamp(0.0, 1.0)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn group(v: &[f64]) -> RewardGroup {
        RewardGroup::new(v.to_vec()).unwrap()
    }

    #[test]
    fn advantage_examples() {
        let a = group_advantages(&group(&[0.0, 0.5, 1.0]));
        let s = 1.224744871391589;
        for (got, want) in a.values.iter().zip([-s, 0.0, s]) {
            assert!((got - want).abs() < 1e-12);
        }
        assert!(!a.degenerate);
        let flat = group_advantages(&group(&[0.7; 5]));
        assert!(flat.degenerate);
        assert_eq!(flat.values, vec![0.0; 5]);
        let pair = group_advantages(&group(&[3.5, -3.5]));
        assert_eq!(pair.values, vec![1.0, -1.0]);
    }

    #[test]
    fn group_validation() {
        assert_eq!(RewardGroup::new(vec![1.0]), Err(RlMathError::GroupTooSmall(1)));
        assert!(matches!(RewardGroup::new(vec![1.0, f64::NAN]), Err(RlMathError::NonFiniteReward { index: 1, .. })));
        assert!(serde_json::from_str::<RewardGroup>("[1.0]").is_err());
        assert_eq!(serde_json::from_str::<RewardGroup>("[1.0, 2.0]").unwrap(), group(&[1.0, 2.0]));
    }

    #[test]
    fn surrogate_examples() {
        assert_eq!(grpo_surrogate(1.0, 0.37, 0.2), 0.37);
        assert!((grpo_surrogate(1.5, 1.0, 0.2) - 1.2).abs() < 1e-15);
        assert!((grpo_surrogate(0.5, -1.0, 0.2) - (-0.8)).abs() < 1e-15);
    }

    #[test]
    fn kl_examples() {
        assert_eq!(kl_penalty(&[-1.0, -2.0], &[-1.0, -2.0]).unwrap(), 0.0);
        assert!((kl_penalty(&[-2.0], &[-1.0]).unwrap() - (std::f64::consts::E - 2.0)).abs() < 1e-12);
        assert!(matches!(kl_penalty(&[0.0], &[0.0, 1.0]), Err(RlMathError::LengthMismatch { .. })));
        assert_eq!(kl_penalty(&[], &[]), Err(RlMathError::EmptyLogProbs));
    }

    #[test]
    fn velocity_examples() {
        let (old, theta) = ([1.0, -2.0, 0.5], [0.25, 4.0, -1.0]);
        assert_eq!(nft_positive_velocity(&old, &theta, 0.0).unwrap(), old.to_vec());
        assert_eq!(nft_positive_velocity(&old, &theta, 1.0).unwrap(), theta.to_vec());
        assert_eq!(nft_negative_velocity(&old, &theta, 0.0).unwrap(), old.to_vec());
        assert_eq!(nft_positive_velocity(&old, &old, 0.3).unwrap(), old.to_vec());
        assert_eq!(nft_negative_velocity(&[0.0, 0.0], &[2.0, -1.0], 1.0).unwrap(), vec![-2.0, 1.0]);
        assert!(matches!(nft_positive_velocity(&[1.0], &[1.0, 2.0], 0.5), Err(RlMathError::DimensionMismatch(_))));
    }

    #[test]
    fn loss_examples() {
        let u = [1.0, -2.0, 3.0];
        let old = [0.5, 0.5, 0.5];
        assert_eq!(nft_loss(&old, &u, &u, 1.0, 1.0).unwrap(), 0.0);
        let l = nft_loss(&old, &old, &u, 0.5, 0.7).unwrap();
        assert!((l - squared_distance(&old, &u)).abs() < 1e-12);
        let l = nft_loss(&[0.0; 3], &u, &u, 0.0, 1.0).unwrap();
        assert!((l - 4.0 * 14.0).abs() < 1e-12);
        assert_eq!(nft_loss(&old, &u, &u, 1.5, 1.0), Err(RlMathError::ProbabilityOutOfRange(1.5)));
        assert!(matches!(nft_loss(&old, &u, &[1.0], 0.5, 1.0), Err(RlMathError::DimensionMismatch(_))));
    }

    #[test]
    fn probability_examples() {
        assert_eq!(reward_to_probability(&group(&[0.2, 0.8])), vec![0.0, 1.0]);
        assert_eq!(reward_to_probability(&group(&[0.3, 0.3, 0.3])), vec![0.5; 3]);
        assert_eq!(reward_to_probability(&group(&[0.0, 0.5, 1.0])), vec![0.0, 0.5, 1.0]);
    }

    #[test]
    fn nft_config() {
        assert!(NftConfig::new(0.5, 0.01).is_some());
        assert!(NftConfig::new(-0.1, 0.01).is_none());
        assert!(NftConfig::new(0.1, f64::NAN).is_none());
    }
}
