//! Seeded training runs, comparisons, sweeps and learning-curve plots.
//!
//! One run is fully determined by its [`RunConfig`]: the run stream is seeded
//! with `seed`, and episode `e` (0-based) is generated from `seed ^ e`.
//! Each environment step performs one gradient update once the replay buffer
//! holds a full batch, followed by a soft target update.

mod artifacts;
mod compare;
mod config;
mod plot;

use std::fmt;

use crate::disrc::DisrcAgent;
use crate::dqn::{epsilon_at, DqnAgent};
use crate::error::{Error, Result};
use crate::gridworld::{EnvKind, OBS_DIM};
use crate::metrics::{EpisodeRecord, Metrics};
use crate::replay::{ReplayBuffer, Transition};
use crate::rng;

pub use artifacts::{format_real, read_episode_rewards, EPISODES_HEADER, SURPRISE_HEADER};
pub use compare::{
    compare, median, sweep, ComparisonReport, ComparisonRow, SweepReport, SweepRow,
    COMPARISON_HEADER, SWEEP_HEADER,
};
pub use config::{AgentKind, RunConfig};
pub use plot::{moving_average, plot, render_svg, Series, DEFAULT_SMOOTHING_WINDOW};

use artifacts::ArtifactWriter;

#[derive(Clone, Debug, PartialEq)]
pub struct RunSummary {
    pub agent: AgentKind,
    pub env: EnvKind,
    pub seed: u64,
    pub total_episodes: usize,
    pub metrics: Metrics,
}

/// Per-episode view of the surprise signal of a DISRC run.
#[derive(Clone, Debug, PartialEq)]
pub struct SurpriseRecord {
    pub episode: usize,
    pub beta: f64,
    pub deviation_min: f64,
    pub deviation_max: f64,
    pub deviation_mean: f64,
    pub bonus_min: f64,
    pub bonus_max: f64,
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub summary: RunSummary,
    pub episodes: Vec<EpisodeRecord>,
    /// Every TD loss, one per gradient update.
    pub losses: Vec<f64>,
    /// Empty for the baseline.
    pub surprise: Vec<SurpriseRecord>,
}

impl fmt::Display for RunSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_summary_string())
    }
}

// One per run, so the size gap between variants does not matter.
#[allow(clippy::large_enum_variant)]
enum Learner {
    Dqn(DqnAgent),
    Disrc(DisrcAgent),
}

struct SurpriseAccumulator {
    beta: f64,
    dev_min: f64,
    dev_max: f64,
    dev_sum: f64,
    bonus_min: f64,
    bonus_max: f64,
    n: usize,
}

impl SurpriseAccumulator {
    fn new() -> Self {
        SurpriseAccumulator {
            beta: 0.0,
            dev_min: f64::INFINITY,
            dev_max: f64::NEG_INFINITY,
            dev_sum: 0.0,
            bonus_min: f64::INFINITY,
            bonus_max: f64::NEG_INFINITY,
            n: 0,
        }
    }

    fn add(&mut self, beta: f64, deviation: f64, bonus: f64) {
        self.beta = beta;
        self.dev_min = self.dev_min.min(deviation);
        self.dev_max = self.dev_max.max(deviation);
        self.dev_sum += deviation;
        self.bonus_min = self.bonus_min.min(bonus);
        self.bonus_max = self.bonus_max.max(bonus);
        self.n += 1;
    }

    fn finish(self, episode: usize) -> SurpriseRecord {
        SurpriseRecord {
            episode,
            beta: self.beta,
            deviation_min: self.dev_min,
            deviation_max: self.dev_max,
            deviation_mean: self.dev_sum / self.n.max(1) as f64,
            bonus_min: self.bonus_min,
            bonus_max: self.bonus_max,
        }
    }
}

/// Runs one configuration end to end. When `out_dir` is set, artifacts are
/// written there; on failure the completed episodes are flushed before the
/// error is returned.
pub fn train(config: &RunConfig) -> Result<RunOutcome> {
    config.validate()?;
    let mut writer = match &config.out_dir {
        Some(dir) => Some(ArtifactWriter::create(
            dir,
            config,
            config.agent == AgentKind::Disrc,
        )?),
        None => None,
    };
    let result = run_loop(config, writer.as_mut());
    if let Some(w) = writer.as_mut() {
        let flushed = w.flush();
        if result.is_ok() {
            flushed?;
        }
    }
    let (outcome, learner) = result?;
    if let Some(w) = &writer {
        outcome.summary.write(&w.dir().join("summary.txt"))?;
        if config.checkpoint {
            match &learner {
                Learner::Dqn(a) => a.q_net.save(&w.dir().join("q_net.bin"))?,
                Learner::Disrc(a) => {
                    a.dqn.q_net.save(&w.dir().join("q_net.bin"))?;
                    a.encoder.net().save(&w.dir().join("encoder.bin"))?;
                }
            }
        }
    }
    Ok(outcome)
}

fn run_loop(
    config: &RunConfig,
    mut writer: Option<&mut ArtifactWriter>,
) -> Result<(RunOutcome, Learner)> {
    let total = config.total_episodes();
    let agent_cfg = config.agent_config();
    let dqn_cfg = agent_cfg.dqn.clone();
    let mut rng = rng::seeded(config.seed);
    let mut learner = match config.agent {
        AgentKind::Dqn => Learner::Dqn(DqnAgent::new(OBS_DIM, dqn_cfg.clone(), &mut rng)?),
        AgentKind::Disrc => Learner::Disrc(DisrcAgent::new(OBS_DIM, agent_cfg, total, &mut rng)?),
    };
    let mut buffer = ReplayBuffer::new(dqn_cfg.buffer_capacity);
    let mut episodes = Vec::with_capacity(total);
    let mut losses = Vec::new();
    let mut surprise = Vec::new();

    for episode in 0..total {
        let mut env = config.env.reset(config.seed ^ episode as u64);
        if config.render {
            println!(
                "episode {} (seed {})\n{}",
                episode + 1,
                config.seed ^ episode as u64,
                env.render()
            );
        }
        let epsilon = epsilon_at(episode, total, &dqn_cfg);
        let mut obs = env.observe().into_vec();
        let mut raw_reward = 0.0;
        let mut shaped_sum = 0.0;
        let mut steps = 0;
        let mut episode_losses = (0.0, 0usize);
        let mut acc = SurpriseAccumulator::new();

        loop {
            let (transition, finished): (Transition, bool) = match &mut learner {
                Learner::Dqn(agent) => {
                    let action = agent.select_action(&obs, epsilon, &mut rng)?;
                    let result = env.step(action)?;
                    raw_reward += result.reward;
                    let finished = result.terminated || result.truncated;
                    let t = Transition {
                        obs: std::mem::take(&mut obs),
                        action,
                        reward: result.reward,
                        next_obs: result.obs.into_vec(),
                        done: result.terminated,
                        deviation: 0.0,
                    };
                    (t, finished)
                }
                Learner::Disrc(agent) => {
                    let step = agent.collect_step(&mut env, &obs, episode, &mut rng)?;
                    raw_reward += step.result.reward;
                    acc.add(step.beta, step.deviation, step.bonus);
                    (
                        step.transition,
                        step.result.terminated || step.result.truncated,
                    )
                }
            };
            shaped_sum += transition.reward;
            steps += 1;
            obs = transition.next_obs.clone();
            buffer.push(transition);

            let loss = match &mut learner {
                Learner::Dqn(agent) => {
                    let loss = agent.train_step(&buffer, &mut rng)?;
                    if loss.is_some() {
                        agent.soft_update()?;
                    }
                    loss
                }
                Learner::Disrc(agent) => {
                    let loss = agent.train_step(&buffer, &mut rng, episode)?;
                    if loss.is_some() {
                        agent.soft_update()?;
                    }
                    loss
                }
            };
            if let Some(l) = loss {
                losses.push(l);
                episode_losses.0 += l;
                episode_losses.1 += 1;
            }
            if finished {
                break;
            }
        }

        let record = EpisodeRecord {
            episode: episode + 1,
            raw_reward,
            shaped_reward_sum: shaped_sum,
            steps,
            mean_loss: (episode_losses.1 > 0).then(|| episode_losses.0 / episode_losses.1 as f64),
            epsilon,
        };
        let surprise_record = matches!(learner, Learner::Disrc(_)).then(|| acc.finish(episode + 1));
        if let Some(w) = writer.as_deref_mut() {
            w.episode(&record, surprise_record.as_ref())?;
        }
        log::debug!(
            "{} {} seed {} episode {}/{}: reward {:.3} steps {}",
            config.agent,
            config.env,
            config.seed,
            episode + 1,
            total,
            raw_reward,
            steps
        );
        episodes.push(record);
        surprise.extend(surprise_record);
    }

    let metrics = Metrics::compute(&episodes, &losses)?;
    if metrics.loss_variance.is_some_and(|v| !v.is_finite()) {
        return Err(Error::Numeric("loss variance is not finite".into()));
    }
    let summary = RunSummary {
        agent: config.agent,
        env: config.env,
        seed: config.seed,
        total_episodes: total,
        metrics,
    };
    Ok((
        RunOutcome {
            summary,
            episodes,
            losses,
            surprise,
        },
        learner,
    ))
}
