//! Learning-curve statistics over raw episode rewards and per-update losses.
//!
//! Variances and standard deviations are population statistics (divide by N).

use crate::error::{Error, Result};

pub const FINAL_WINDOW: usize = 50;
pub const SUCCESS_THRESHOLD: f64 = 0.8;

#[derive(Clone, Debug, PartialEq)]
pub struct EpisodeRecord {
    /// 1-based.
    pub episode: usize,
    pub raw_reward: f64,
    pub shaped_reward_sum: f64,
    pub steps: usize,
    pub mean_loss: Option<f64>,
    pub epsilon: f64,
}

/// Mean of the last `min(window, len)` rewards.
pub fn mean_final_reward(rewards: &[f64], window: usize) -> Result<f64> {
    if rewards.is_empty() {
        return Err(Error::Usage(
            "mean_final_reward of an empty sequence".into(),
        ));
    }
    if window == 0 {
        return Err(Error::Usage(
            "mean_final_reward window must be positive".into(),
        ));
    }
    let tail = &rewards[rewards.len() - window.min(rewards.len())..];
    Ok(tail.iter().sum::<f64>() / tail.len() as f64)
}

/// 1-based index of the first reward strictly above `threshold`.
pub fn episodes_to_threshold(rewards: &[f64], threshold: f64) -> Option<usize> {
    rewards.iter().position(|&r| r > threshold).map(|i| i + 1)
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn population_variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / xs.len() as f64
}

pub fn reward_std(rewards: &[f64]) -> Result<f64> {
    if rewards.is_empty() {
        return Err(Error::Usage("reward_std of an empty sequence".into()));
    }
    Ok(population_variance(rewards).sqrt())
}

/// `None` when no update ever ran.
pub fn loss_variance(losses: &[f64]) -> Option<f64> {
    (!losses.is_empty()).then(|| population_variance(losses))
}

/// Trapezoidal area under the reward curve with unit episode spacing.
pub fn auc(rewards: &[f64]) -> Result<f64> {
    if rewards.len() < 2 {
        return Err(Error::Usage(format!(
            "auc needs at least 2 episodes, got {}",
            rewards.len()
        )));
    }
    Ok(rewards.windows(2).map(|w| 0.5 * (w[0] + w[1])).sum())
}

/// The five learning metrics of one run.
#[derive(Clone, Debug, PartialEq)]
pub struct Metrics {
    pub mean_final_reward: f64,
    pub episodes_to_threshold: Option<usize>,
    pub loss_variance: Option<f64>,
    pub reward_std: f64,
    /// `None` for single-episode runs.
    pub auc: Option<f64>,
    /// First episode with any positive raw reward.
    pub first_success: Option<usize>,
}

impl Metrics {
    pub fn compute(records: &[EpisodeRecord], losses: &[f64]) -> Result<Self> {
        let rewards: Vec<f64> = records.iter().map(|r| r.raw_reward).collect();
        Ok(Metrics {
            mean_final_reward: mean_final_reward(&rewards, FINAL_WINDOW)?,
            episodes_to_threshold: episodes_to_threshold(&rewards, SUCCESS_THRESHOLD),
            loss_variance: loss_variance(losses),
            reward_std: reward_std(&rewards)?,
            auc: (rewards.len() >= 2).then(|| auc(&rewards)).transpose()?,
            first_success: episodes_to_threshold(&rewards, 0.0),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_final_examples() {
        assert!((mean_final_reward(&vec![0.96; 700], 50).unwrap() - 0.96).abs() < 1e-12);
        assert_eq!(mean_final_reward(&[0.0, 0.0, 1.0], 2).unwrap(), 0.5);
        let ten: Vec<f64> = (0..10).map(|i| i as f64).collect();
        assert_eq!(mean_final_reward(&ten, 50).unwrap(), 4.5);
        assert!(mean_final_reward(&[], 50).is_err());
    }

    #[test]
    fn threshold_examples() {
        assert_eq!(episodes_to_threshold(&[0.1, 0.85, 0.9], 0.8), Some(2));
        assert_eq!(episodes_to_threshold(&[0.1, 0.8, 0.3], 0.8), None);
        assert_eq!(episodes_to_threshold(&[0.8, 0.80001], 0.8), Some(2));
    }

    #[test]
    fn spread_examples() {
        assert_eq!(reward_std(&[0.3; 9]).unwrap(), 0.0);
        assert_eq!(reward_std(&[0.0, 1.0]).unwrap(), 0.5);
        assert_eq!(reward_std(&[0.0, 0.0, 1.0, 1.0]).unwrap(), 0.5);
        assert_eq!(loss_variance(&[2.0; 4]), Some(0.0));
        assert_eq!(loss_variance(&[1.0, 3.0]), Some(1.0));
        assert_eq!(loss_variance(&[5.0]), Some(0.0));
        assert_eq!(loss_variance(&[]), None);
    }

    #[test]
    fn auc_examples() {
        assert_eq!(auc(&[0.0, 1.0, 1.0]).unwrap(), 1.5);
        assert_eq!(auc(&[0.25; 9]).unwrap(), 0.25 * 8.0);
        assert_eq!(auc(&[1.0, 0.0]).unwrap(), 0.5);
        assert!(auc(&[1.0]).is_err());
    }
}
