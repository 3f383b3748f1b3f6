//! Baseline DQN: online and target Q-networks, epsilon-greedy acting, and the
//! squared TD loss with soft target updates.

use std::fmt;
use std::str::FromStr;

use rand::Rng as _;

use crate::error::{Error, Result};
use crate::gridworld::{Action, NUM_ACTIONS};
use crate::nn::{clip_grad_norm, AdamState, Matrix, Mlp};
use crate::replay::{batch_matrices, ReplayBuffer, Transition, DEFAULT_CAPACITY};
use crate::rng::Rng;

/// Which network picks the bootstrap action.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TargetRule {
    /// Online network chooses `argmax_a Q(s', a)`, target network evaluates it.
    Double,
    /// Target network both chooses and evaluates (`max_a Q_target(s', a)`).
    Vanilla,
}

impl fmt::Display for TargetRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TargetRule::Double => "double",
            TargetRule::Vanilla => "vanilla",
        })
    }
}

impl FromStr for TargetRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "double" => Ok(TargetRule::Double),
            "vanilla" => Ok(TargetRule::Vanilla),
            other => Err(Error::Config(format!("unknown target_rule '{other}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DqnConfig {
    pub gamma: f64,
    pub q_lr: f64,
    pub tau: f64,
    pub batch_size: usize,
    pub eps_start: f64,
    pub eps_min: f64,
    /// Fraction of the episode budget over which epsilon decays linearly.
    pub eps_decay_fraction: f64,
    pub grad_clip_max_norm: f64,
    pub hidden: Vec<usize>,
    pub target_rule: TargetRule,
    pub buffer_capacity: usize,
}

impl Default for DqnConfig {
    fn default() -> Self {
        DqnConfig {
            gamma: 0.99,
            q_lr: 1e-4,
            tau: 0.005,
            batch_size: 128,
            eps_start: 1.0,
            eps_min: 0.1,
            eps_decay_fraction: 0.8,
            grad_clip_max_norm: 0.3,
            hidden: vec![256, 256],
            target_rule: TargetRule::Double,
            buffer_capacity: DEFAULT_CAPACITY,
        }
    }
}

impl DqnConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return fail(format!("gamma must be in (0, 1], got {}", self.gamma));
        }
        if !(self.tau > 0.0 && self.tau <= 1.0) {
            return fail(format!("tau must be in (0, 1], got {}", self.tau));
        }
        if !(self.q_lr > 0.0 && self.q_lr.is_finite()) {
            return fail(format!("q_lr must be positive, got {}", self.q_lr));
        }
        if self.batch_size == 0 {
            return fail("batch_size must be positive".into());
        }
        if !(0.0..=1.0).contains(&self.eps_min) || !(0.0..=1.0).contains(&self.eps_start) {
            return fail("epsilon values must lie in [0, 1]".into());
        }
        if self.eps_min > self.eps_start {
            return fail(format!(
                "eps_min {} exceeds eps_start {}",
                self.eps_min, self.eps_start
            ));
        }
        if !(self.eps_decay_fraction > 0.0 && self.eps_decay_fraction <= 1.0) {
            return fail(format!(
                "eps_decay_fraction must be in (0, 1], got {}",
                self.eps_decay_fraction
            ));
        }
        if self.grad_clip_max_norm.is_nan() || self.grad_clip_max_norm <= 0.0 {
            return fail(format!(
                "grad_clip must be positive, got {}",
                self.grad_clip_max_norm
            ));
        }
        if self.hidden.is_empty() || self.hidden.contains(&0) {
            return fail(format!(
                "hidden must list positive widths, got {:?}",
                self.hidden
            ));
        }
        if self.buffer_capacity < self.batch_size {
            return fail(format!(
                "buffer_capacity {} is smaller than batch_size {}",
                self.buffer_capacity, self.batch_size
            ));
        }
        Ok(())
    }
}

/// Linear decay from `eps_start` to `eps_min` over the first
/// `eps_decay_fraction * total_episodes` episodes (0-based), flat afterwards.
pub fn epsilon_at(episode: usize, total_episodes: usize, cfg: &DqnConfig) -> f64 {
    let horizon = cfg.eps_decay_fraction * total_episodes as f64;
    let e = episode as f64;
    if horizon <= 0.0 || e >= horizon {
        cfg.eps_min
    } else {
        cfg.eps_start - (cfg.eps_start - cfg.eps_min) * (e / horizon)
    }
}

/// First index of the largest value.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

#[derive(Clone, Debug)]
pub struct DqnAgent {
    pub q_net: Mlp,
    pub target_net: Mlp,
    pub optimizer: AdamState,
    pub config: DqnConfig,
}

impl DqnAgent {
    /// Draws the Q-network from `rng`; the target starts as an exact copy.
    pub fn new(obs_dim: usize, config: DqnConfig, rng: &mut Rng) -> Result<Self> {
        config.validate()?;
        let mut dims = vec![obs_dim];
        dims.extend_from_slice(&config.hidden);
        dims.push(NUM_ACTIONS);
        let q_net = Mlp::init(&dims, rng)?;
        let target_net = q_net.clone();
        let optimizer = AdamState::for_net(&q_net, config.q_lr);
        Ok(DqnAgent {
            q_net,
            target_net,
            optimizer,
            config,
        })
    }

    pub fn q_values(&self, obs: &[f64]) -> Result<Vec<f64>> {
        self.q_net.predict_one(obs)
    }

    pub fn greedy_action(&self, obs: &[f64]) -> Result<Action> {
        Action::from_index(argmax(&self.q_values(obs)?))
    }

    /// Epsilon-greedy. Always consumes one uniform draw, plus one action draw
    /// when exploring.
    pub fn select_action(&self, obs: &[f64], epsilon: f64, rng: &mut Rng) -> Result<Action> {
        if rng.random::<f64>() < epsilon {
            Action::from_index(rng.random_range(0..NUM_ACTIONS))
        } else {
            self.greedy_action(obs)
        }
    }

    /// `y = r + gamma * Q_target(s', a*) * (1 - d)`, with `a*` chosen per
    /// [`TargetRule`].
    pub fn compute_targets(&self, batch: &[&Transition]) -> Result<Vec<f64>> {
        if batch.is_empty() {
            return Err(Error::Usage("compute_targets on an empty batch".into()));
        }
        let (_, next) = batch_matrices(batch);
        self.targets_for(batch, &next)
    }

    fn targets_for(&self, batch: &[&Transition], next: &Matrix) -> Result<Vec<f64>> {
        let gamma = self.config.gamma;
        let target_q = self.target_net.predict(next)?;
        let chooser = match self.config.target_rule {
            TargetRule::Double => Some(self.q_net.predict(next)?),
            TargetRule::Vanilla => None,
        };
        Ok(batch
            .iter()
            .enumerate()
            .map(|(i, t)| {
                if t.done {
                    return t.reward;
                }
                let row = target_q.row(i);
                let a = argmax(chooser.as_ref().map_or(row, |c| c.row(i)));
                t.reward + gamma * row[a]
            })
            .collect())
    }

    /// One gradient step on a uniformly sampled batch, or `None` while the
    /// buffer is smaller than the batch.
    pub fn train_step(&mut self, buffer: &ReplayBuffer, rng: &mut Rng) -> Result<Option<f64>> {
        match buffer.sample(self.config.batch_size, rng) {
            Some(batch) => self.train_on_batch(&batch, None).map(Some),
            None => Ok(None),
        }
    }

    /// Mean of `w_i * (Q(s_i, a_i) - y_i)^2`, with `w_i = 1` when no weights
    /// are given. Targets and weights are constants for the gradient.
    pub fn train_on_batch(
        &mut self,
        batch: &[&Transition],
        weights: Option<&[f64]>,
    ) -> Result<f64> {
        if batch.is_empty() {
            return Err(Error::Usage("train_on_batch on an empty batch".into()));
        }
        if let Some(w) = weights {
            if w.len() != batch.len() {
                return Err(Error::shape(batch.len(), w.len()));
            }
        }
        let (obs, next) = batch_matrices(batch);
        let targets = self.targets_for(batch, &next)?;
        let (q, cache) = self.q_net.forward(&obs)?;
        let n = batch.len() as f64;
        let mut d_out = Matrix::zeros(q.rows(), q.cols());
        let mut loss = 0.0;
        for (i, (t, y)) in batch.iter().zip(&targets).enumerate() {
            let a = t.action.index();
            let w = weights.map_or(1.0, |w| w[i]);
            let td = q.row(i)[a] - y;
            loss += w * td * td;
            d_out.row_mut(i)[a] = 2.0 * w * td / n;
        }
        loss /= n;
        if !loss.is_finite() {
            return Err(Error::Numeric(format!("TD loss is {loss}")));
        }
        let mut grads = self.q_net.backward_params(cache, &d_out)?;
        clip_grad_norm(&mut grads, self.config.grad_clip_max_norm)?;
        self.optimizer.step_net(&mut self.q_net, &grads)?;
        Ok(loss)
    }

    /// Polyak-averages the online parameters into the target network.
    pub fn soft_update(&mut self) -> Result<()> {
        self.target_net
            .soft_update_from(&self.q_net, self.config.tau)
    }
}
