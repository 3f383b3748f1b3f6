//! Deep Q-learning laboratory for sparse-reward gridworlds.
//!
//! The crate contains everything needed to train and compare a vanilla DQN
//! agent against a surprise-regularized variant (DISRC) on DoorKey and
//! LavaCrossing style gridworlds:
//!
//! - [`gridworld`]: seedable environments with MiniGrid action and reward semantics
//! - [`nn`]: a small dense-network stack with manual backpropagation and Adam
//! - [`replay`]: a fixed-capacity experience replay ring
//! - [`dqn`]: the baseline agent
//! - [`disrc`]: latent encoder, moving setpoint, and surprise shaping
//! - [`metrics`]: learning-curve summary statistics
//! - [`harness`]: configuration, seeded training runs, comparisons, sweeps, and plots

pub mod disrc;
pub mod dqn;
pub mod error;
pub mod gridworld;
pub mod harness;
pub mod metrics;
pub mod nn;
pub mod replay;
pub mod rng;

pub use disrc::{DisrcAgent, DisrcConfig, EncoderMode, Modulation, SurpriseState};
pub use dqn::{DqnAgent, DqnConfig, TargetRule};
pub use error::{Error, Result};
pub use gridworld::{Action, EnvKind, GridState, Observation, StepResult};
pub use harness::{AgentKind, RunConfig, RunSummary};
pub use metrics::EpisodeRecord;
pub use nn::{AdamState, Matrix, Mlp};
pub use replay::{ReplayBuffer, Transition};
pub use rng::Rng;
