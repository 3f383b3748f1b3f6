//! Surprise-regularized DQN.
//!
//! On top of the baseline agent, DISRC encodes every observation into a
//! 64-dimensional latent, tracks a slowly moving latent setpoint, and measures
//! surprise as the distance between the unit-normalized latent and the
//! unit-normalized setpoint. That surprise, scaled by a coefficient that
//! anneals to zero over training, either shapes the stored reward
//! ([`Modulation::RewardShaping`]) or weights the per-sample TD loss
//! ([`Modulation::UpdateScaling`]).
//!
//! Per environment step the controller does, in order:
//!
//! 1. act epsilon-greedily and step the environment
//! 2. encode the next observation
//! 3. compute the deviation against the setpoint *before* updating it
//! 4. move the setpoint towards the new latent
//! 5. shape the raw reward with the episode's `beta`
//!
//! Shaped rewards only ever live in replay and in the loss. Telemetry keeps
//! the raw environment reward separately.

use std::fmt;
use std::str::FromStr;

use crate::dqn::{epsilon_at, DqnAgent, DqnConfig};
use crate::error::{Error, Result};
use crate::gridworld::{GridState, StepResult};
use crate::nn::{AdamState, Matrix, Mlp, MlpBuilder};
use crate::replay::{batch_matrices, ReplayBuffer, Transition};
use crate::rng::{self, Rng};

pub const LATENT_DIM: usize = 64;
pub const ENCODER_HIDDEN: [usize; 2] = [256, 128];
pub const BETA_EXPONENT: f64 = 1.2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EncoderMode {
    /// Trained jointly with a linear decoder on observation reconstruction.
    Reconstruction,
    /// Randomly initialized and never updated.
    Frozen,
}

impl fmt::Display for EncoderMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EncoderMode::Reconstruction => "reconstruction",
            EncoderMode::Frozen => "frozen",
        })
    }
}

impl FromStr for EncoderMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "reconstruction" => Ok(EncoderMode::Reconstruction),
            "frozen" => Ok(EncoderMode::Frozen),
            other => Err(Error::Config(format!("unknown encoder_mode '{other}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Modulation {
    /// Store `r / EMA(|r|) - lambda * beta * deviation` in replay.
    RewardShaping,
    /// Store the raw reward and weight each squared TD error by
    /// `1 + lambda * beta * deviation`.
    UpdateScaling,
}

impl fmt::Display for Modulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Modulation::RewardShaping => "reward_shaping",
            Modulation::UpdateScaling => "update_scaling",
        })
    }
}

impl FromStr for Modulation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "reward_shaping" => Ok(Modulation::RewardShaping),
            "update_scaling" => Ok(Modulation::UpdateScaling),
            other => Err(Error::Config(format!("unknown modulation '{other}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DisrcConfig {
    pub dqn: DqnConfig,
    pub beta0: f64,
    pub lambda: f64,
    pub rho_mu: f64,
    pub rho_r: f64,
    pub norm_eps: f64,
    pub encoder_mode: EncoderMode,
    pub encoder_lr: f64,
    pub modulation: Modulation,
    /// Pin `EMA(|r|)` at its initial value of 1.
    pub freeze_reward_ema: bool,
}

impl Default for DisrcConfig {
    fn default() -> Self {
        DisrcConfig {
            dqn: DqnConfig::default(),
            beta0: 0.2,
            lambda: 1.0,
            rho_mu: 0.995,
            rho_r: 0.99,
            norm_eps: 1e-8,
            encoder_mode: EncoderMode::Reconstruction,
            encoder_lr: 3e-4,
            modulation: Modulation::RewardShaping,
            freeze_reward_ema: false,
        }
    }
}

impl DisrcConfig {
    pub fn validate(&self) -> Result<()> {
        self.dqn.validate()?;
        let fail = |msg: String| Err(Error::Config(msg));
        if !(self.beta0 >= 0.0 && self.beta0.is_finite()) {
            return fail(format!("beta0 must be >= 0, got {}", self.beta0));
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return fail(format!("lambda must be >= 0, got {}", self.lambda));
        }
        for (name, rho) in [("rho_mu", self.rho_mu), ("rho_r", self.rho_r)] {
            if !(0.0..1.0).contains(&rho) {
                return fail(format!("{name} must be in [0, 1), got {rho}"));
            }
        }
        if self.norm_eps.is_nan() || self.norm_eps <= 0.0 {
            return fail(format!("norm_eps must be positive, got {}", self.norm_eps));
        }
        if !(self.encoder_lr > 0.0 && self.encoder_lr.is_finite()) {
            return fail(format!(
                "encoder_lr must be positive, got {}",
                self.encoder_lr
            ));
        }
        Ok(())
    }
}

/// Observation encoder `147 -> 256 -> 128 -> 64` with an optional decoder.
#[derive(Clone, Debug)]
pub struct Encoder {
    net: Mlp,
    decoder: Option<Mlp>,
    net_opt: AdamState,
    decoder_opt: AdamState,
    mode: EncoderMode,
}

impl Encoder {
    pub fn new(obs_dim: usize, mode: EncoderMode, lr: f64, rng: &mut Rng) -> Result<Self> {
        let mut dims = vec![obs_dim];
        dims.extend_from_slice(&ENCODER_HIDDEN);
        dims.push(LATENT_DIM);
        let net = Mlp::init(&dims, rng)?;
        let decoder = match mode {
            EncoderMode::Reconstruction => {
                Some(MlpBuilder::new(LATENT_DIM).dense(obs_dim).build(rng)?)
            }
            EncoderMode::Frozen => None,
        };
        let net_opt = AdamState::for_net(&net, lr);
        let decoder_opt = AdamState::new(decoder.as_ref().map_or(0, Mlp::param_count), lr);
        Ok(Encoder {
            net,
            decoder,
            net_opt,
            decoder_opt,
            mode,
        })
    }

    pub fn mode(&self) -> EncoderMode {
        self.mode
    }

    pub fn net(&self) -> &Mlp {
        &self.net
    }

    pub fn encode(&self, obs: &[f64]) -> Result<Vec<f64>> {
        let latent = self.net.predict_one(obs)?;
        if latent.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric(
                "encoder produced a non-finite latent".into(),
            ));
        }
        Ok(latent)
    }

    /// One Adam step on mean squared reconstruction error of `obs`.
    /// Returns `None` for a frozen encoder.
    pub fn train_reconstruction(&mut self, obs: &Matrix) -> Result<Option<f64>> {
        let Some(decoder) = self.decoder.as_mut() else {
            return Ok(None);
        };
        let (latent, enc_cache) = self.net.forward(obs)?;
        let (recon, dec_cache) = decoder.forward(&latent)?;
        let count = (obs.rows() * obs.cols()) as f64;
        let mut d_recon = Matrix::zeros(recon.rows(), recon.cols());
        let mut loss = 0.0;
        for ((d, r), x) in d_recon
            .as_mut_slice()
            .iter_mut()
            .zip(recon.as_slice())
            .zip(obs.as_slice())
        {
            let diff = r - x;
            loss += diff * diff;
            *d = 2.0 * diff / count;
        }
        loss /= count;
        if !loss.is_finite() {
            return Err(Error::Numeric(format!("reconstruction loss is {loss}")));
        }
        let (dec_grads, d_latent) = decoder.backward(dec_cache, &d_recon)?;
        let enc_grads = self.net.backward_params(enc_cache, &d_latent)?;
        self.decoder_opt.step_net(decoder, &dec_grads)?;
        self.net_opt.step_net(&mut self.net, &enc_grads)?;
        Ok(Some(loss))
    }
}

/// `|| s / max(|s|, eps) - mu / max(|mu|, eps) ||_2`, always in `[0, 2]`.
pub fn deviation(latent: &[f64], mu: &[f64], norm_eps: f64) -> f64 {
    let ls = 1.0 / norm2(latent).max(norm_eps);
    let ms = 1.0 / norm2(mu).max(norm_eps);
    let d = latent
        .iter()
        .zip(mu)
        .map(|(s, m)| {
            let diff = s * ls - m * ms;
            diff * diff
        })
        .sum::<f64>()
        .sqrt();
    d.min(2.0)
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Output of [`SurpriseState::shape_reward`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Shaped {
    pub reward: f64,
    /// Surprise term `b = -beta * deviation`; never positive.
    pub bonus: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SurpriseState {
    pub mu: Vec<f64>,
    pub rho_mu: f64,
    pub reward_mag_ema: f64,
    pub rho_r: f64,
    pub beta0: f64,
    pub lambda: f64,
    pub total_episodes: usize,
    pub norm_eps: f64,
    pub freeze_reward_ema: bool,
}

impl SurpriseState {
    pub fn new(cfg: &DisrcConfig, total_episodes: usize) -> Self {
        SurpriseState {
            mu: vec![0.0; LATENT_DIM],
            rho_mu: cfg.rho_mu,
            reward_mag_ema: 1.0,
            rho_r: cfg.rho_r,
            beta0: cfg.beta0,
            lambda: cfg.lambda,
            total_episodes,
            norm_eps: cfg.norm_eps,
            freeze_reward_ema: cfg.freeze_reward_ema,
        }
    }

    pub fn deviation(&self, latent: &[f64]) -> f64 {
        deviation(latent, &self.mu, self.norm_eps)
    }

    /// `mu <- rho_mu * mu + (1 - rho_mu) * latent`
    pub fn update_setpoint(&mut self, latent: &[f64]) {
        let rho = self.rho_mu;
        for (m, s) in self.mu.iter_mut().zip(latent) {
            *m = rho * *m + (1.0 - rho) * s;
        }
    }

    /// `beta0 * (1 - progress^1.2)` with `progress = episode / total_episodes`
    /// clamped to `[0, 1]`. Training passes the 1-based episode number, so the
    /// final episode is fully annealed.
    pub fn beta_at(&self, episode: usize) -> f64 {
        let progress = if self.total_episodes == 0 {
            1.0
        } else {
            (episode as f64 / self.total_episodes as f64).clamp(0.0, 1.0)
        };
        self.beta0 * (1.0 - progress.powf(BETA_EXPONENT))
    }

    /// Updates `EMA(|r|)` first, then returns `r / EMA(|r|) + lambda * b`.
    pub fn shape_reward(&mut self, reward: f64, deviation: f64, beta: f64) -> Shaped {
        if !self.freeze_reward_ema {
            self.reward_mag_ema =
                self.rho_r * self.reward_mag_ema + (1.0 - self.rho_r) * reward.abs();
        }
        self.reward_mag_ema = self.reward_mag_ema.max(self.norm_eps);
        let bonus = -beta * deviation;
        Shaped {
            reward: reward / self.reward_mag_ema + self.lambda * bonus,
            bonus,
        }
    }
}

/// Everything observed during one DISRC environment step.
#[derive(Clone, Debug)]
pub struct CollectedStep {
    pub transition: Transition,
    pub result: StepResult,
    pub shaped_reward: f64,
    pub bonus: f64,
    pub deviation: f64,
    pub beta: f64,
    pub epsilon: f64,
}

#[derive(Clone, Debug)]
pub struct DisrcAgent {
    pub dqn: DqnAgent,
    pub encoder: Encoder,
    pub surprise: SurpriseState,
    pub config: DisrcConfig,
}

impl DisrcAgent {
    /// The Q-network is drawn from `rng` exactly as for the baseline; the
    /// encoder comes from an independent substream, leaving `rng` where the
    /// baseline would leave it.
    pub fn new(
        obs_dim: usize,
        config: DisrcConfig,
        total_episodes: usize,
        rng: &mut Rng,
    ) -> Result<Self> {
        config.validate()?;
        if total_episodes == 0 {
            return Err(Error::Config("total_episodes must be positive".into()));
        }
        let dqn = DqnAgent::new(obs_dim, config.dqn.clone(), rng)?;
        let encoder = Encoder::new(
            obs_dim,
            config.encoder_mode,
            config.encoder_lr,
            &mut rng::substream(rng),
        )?;
        let surprise = SurpriseState::new(&config, total_episodes);
        Ok(DisrcAgent {
            dqn,
            encoder,
            surprise,
            config,
        })
    }

    /// Acts, steps `env`, and builds the transition to store. `episode` is
    /// 0-based.
    pub fn collect_step(
        &mut self,
        env: &mut GridState,
        obs: &[f64],
        episode: usize,
        rng: &mut Rng,
    ) -> Result<CollectedStep> {
        let total = self.surprise.total_episodes;
        if episode >= total {
            return Err(Error::Usage(format!(
                "episode {episode} outside 0..{total}"
            )));
        }
        let epsilon = epsilon_at(episode, total, &self.dqn.config);
        let action = self.dqn.select_action(obs, epsilon, rng)?;
        let result = env.step(action)?;

        let latent = self.encoder.encode(result.obs.as_slice())?;
        let deviation = self.surprise.deviation(&latent);
        self.surprise.update_setpoint(&latent);
        let beta = self.surprise.beta_at(episode + 1);
        let shaped = self.surprise.shape_reward(result.reward, deviation, beta);
        if !shaped.reward.is_finite() {
            return Err(Error::Numeric(format!(
                "shaped reward is {}",
                shaped.reward
            )));
        }

        let stored = match self.config.modulation {
            Modulation::RewardShaping => shaped.reward,
            Modulation::UpdateScaling => result.reward,
        };
        let transition = Transition {
            obs: obs.to_vec(),
            action,
            reward: stored,
            next_obs: result.obs.as_slice().to_vec(),
            done: result.terminated,
            deviation,
        };
        Ok(CollectedStep {
            transition,
            result,
            shaped_reward: stored,
            bonus: shaped.bonus,
            deviation,
            beta,
            epsilon,
        })
    }

    /// Q-update (plain or surprise-weighted) followed by one encoder step on
    /// the same batch. `episode` is 0-based.
    pub fn train_step(
        &mut self,
        buffer: &ReplayBuffer,
        rng: &mut Rng,
        episode: usize,
    ) -> Result<Option<f64>> {
        let Some(batch) = buffer.sample(self.dqn.config.batch_size, rng) else {
            return Ok(None);
        };
        let loss = match self.config.modulation {
            Modulation::RewardShaping => self.dqn.train_on_batch(&batch, None)?,
            Modulation::UpdateScaling => {
                let scale = self.config.lambda * self.surprise.beta_at(episode + 1);
                let weights: Vec<f64> = batch.iter().map(|t| 1.0 + scale * t.deviation).collect();
                self.dqn.train_on_batch(&batch, Some(&weights))?
            }
        };
        if self.encoder.mode() == EncoderMode::Reconstruction {
            let (obs, _) = batch_matrices(&batch);
            self.encoder.train_reconstruction(&obs)?;
        }
        Ok(Some(loss))
    }

    pub fn soft_update(&mut self) -> Result<()> {
        self.dqn.soft_update()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridworld::{reset_lavacrossing, OBS_DIM};
    use crate::rng::seeded;

    fn unit(i: usize) -> Vec<f64> {
        let mut v = vec![0.0; LATENT_DIM];
        v[i] = 1.0;
        v
    }

    #[test]
    fn deviation_examples() {
        let v: Vec<f64> = (0..LATENT_DIM).map(|i| i as f64 - 20.0).collect();
        assert_eq!(deviation(&v, &v, 1e-8), 0.0);
        let neg: Vec<f64> = unit(0).iter().map(|x| -x).collect();
        assert_eq!(deviation(&unit(0), &neg, 1e-8), 2.0);
        assert!((deviation(&unit(0), &unit(1), 1e-8) - std::f64::consts::SQRT_2).abs() < 1e-12);
        // Zero setpoint: only the latent's unit vector remains.
        assert!((deviation(&v, &vec![0.0; LATENT_DIM], 1e-8) - 1.0).abs() < 1e-12);
        assert_eq!(
            deviation(&vec![0.0; LATENT_DIM], &vec![0.0; LATENT_DIM], 1e-8),
            0.0
        );
    }

    #[test]
    fn setpoint_moves_by_ema() {
        let mut s = SurpriseState::new(&DisrcConfig::default(), 10);
        let v: Vec<f64> = (0..LATENT_DIM).map(|i| i as f64).collect();
        s.update_setpoint(&v);
        for (m, x) in s.mu.iter().zip(&v) {
            assert!((m - 0.005 * x).abs() < 1e-15);
        }
        let before = s.mu.clone();
        let same = s.mu.clone();
        s.update_setpoint(&same);
        assert_eq!(s.mu, before);
    }

    #[test]
    fn beta_schedule() {
        let s = SurpriseState::new(&DisrcConfig::default(), 100);
        assert_eq!(s.beta_at(0), 0.2);
        assert_eq!(s.beta_at(100), 0.0);
        assert!((s.beta_at(50) - 0.2 * (1.0 - 0.5f64.powf(1.2))).abs() < 1e-15);
        assert!((s.beta_at(50) - 0.11294).abs() < 1e-5);
        assert_eq!(s.beta_at(150), 0.0);
    }

    #[test]
    fn shaping_examples() {
        let mut s = SurpriseState::new(&DisrcConfig::default(), 10);
        let out = s.shape_reward(1.0, 0.5, 0.1);
        assert_eq!(s.reward_mag_ema, 1.0);
        assert!((out.reward - 0.95).abs() < 1e-15);
        assert!((out.bonus + 0.05).abs() < 1e-15);

        let mut s = SurpriseState::new(&DisrcConfig::default(), 10);
        let out = s.shape_reward(0.0, 0.0, 0.2);
        assert_eq!(out.reward, 0.0);

        // beta = 0: pure normalization by the updated EMA.
        let mut s = SurpriseState::new(&DisrcConfig::default(), 10);
        let out = s.shape_reward(0.5, 1.3, 0.0);
        assert_eq!(out.reward, 0.5 / (0.99 + 0.01 * 0.5));
    }

    #[test]
    fn reward_ema_never_drops_below_eps() {
        let mut s = SurpriseState::new(&DisrcConfig::default(), 10);
        for _ in 0..10_000 {
            let out = s.shape_reward(0.0, 0.3, 0.1);
            assert!(out.reward.is_finite());
        }
        assert!(s.reward_mag_ema >= s.norm_eps);
    }

    #[test]
    fn frozen_encoder_is_pure() {
        let mut enc = Encoder::new(OBS_DIM, EncoderMode::Frozen, 3e-4, &mut seeded(0)).unwrap();
        let obs = reset_lavacrossing(1, 9, 1).unwrap().observe();
        let a = enc.encode(obs.as_slice()).unwrap();
        assert_eq!(a.len(), LATENT_DIM);
        let batch = Matrix::from_rows(&[obs.as_slice()]).unwrap();
        assert_eq!(enc.train_reconstruction(&batch).unwrap(), None);
        assert_eq!(enc.encode(obs.as_slice()).unwrap(), a);
    }

    #[test]
    fn reconstruction_training_reduces_loss() {
        let mut enc =
            Encoder::new(OBS_DIM, EncoderMode::Reconstruction, 3e-4, &mut seeded(0)).unwrap();
        let rows: Vec<Vec<f64>> = (0..8)
            .map(|s| reset_lavacrossing(s, 9, 1).unwrap().observe().into_vec())
            .collect();
        let batch = Matrix::from_rows(&rows).unwrap();
        let first = enc.train_reconstruction(&batch).unwrap().unwrap();
        let mut last = first;
        for _ in 0..200 {
            last = enc.train_reconstruction(&batch).unwrap().unwrap();
        }
        assert!(last < 0.5 * first, "{first} -> {last}");
    }

    #[test]
    fn first_collect_step_is_finite() {
        let cfg = DisrcConfig {
            dqn: DqnConfig {
                hidden: vec![8],
                ..DqnConfig::default()
            },
            ..DisrcConfig::default()
        };
        let mut rng = seeded(5);
        let mut agent = DisrcAgent::new(OBS_DIM, cfg, 10, &mut rng).unwrap();
        let mut env = reset_lavacrossing(2, 9, 1).unwrap();
        let obs = env.observe().into_vec();
        let step = agent.collect_step(&mut env, &obs, 0, &mut rng).unwrap();
        assert!(step.deviation.is_finite() && (0.0..=2.0).contains(&step.deviation));
        assert!(step.bonus <= 0.0);
        assert!(step.shaped_reward.is_finite());
        assert!(matches!(
            agent.collect_step(&mut env, &obs, 10, &mut rng),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn beta_zero_stores_normalized_reward() {
        let cfg = DisrcConfig {
            beta0: 0.0,
            dqn: DqnConfig {
                hidden: vec![8],
                ..DqnConfig::default()
            },
            ..DisrcConfig::default()
        };
        let mut s = SurpriseState::new(&cfg, 5);
        let beta = s.beta_at(1);
        let out = s.shape_reward(0.8, 1.7, beta);
        assert_eq!(out.reward, 0.8 / s.reward_mag_ema);
    }
}
