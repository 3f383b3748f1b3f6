//! Run configuration and its flat `key = value` file format.
//!
//! ```text
//! # comments start with '#'
//! env = doorkey8          # doorkey8 | lavacrossing9
//! agent = disrc           # dqn | disrc
//! episodes = 300
//! seed = 4
//! hidden = 256,256
//! ```
//!
//! Unknown keys, repeated keys and malformed values are errors. Keys that are
//! not set carry the defaults listed by [`RunConfig::to_config_string`].

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::disrc::DisrcConfig;
use crate::dqn::DqnConfig;
use crate::error::{Error, Result};
use crate::gridworld::EnvKind;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AgentKind {
    Dqn,
    Disrc,
}

impl AgentKind {
    pub fn name(self) -> &'static str {
        match self {
            AgentKind::Dqn => "dqn",
            AgentKind::Disrc => "disrc",
        }
    }

    pub fn other(self) -> Self {
        match self {
            AgentKind::Dqn => AgentKind::Disrc,
            AgentKind::Disrc => AgentKind::Dqn,
        }
    }
}

impl fmt::Display for AgentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AgentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dqn" => Ok(AgentKind::Dqn),
            "disrc" => Ok(AgentKind::Disrc),
            other => Err(Error::Config(format!(
                "unknown agent '{other}' (expected dqn or disrc)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub env: EnvKind,
    pub agent: AgentKind,
    /// `None` means the environment's default budget.
    pub episodes: Option<usize>,
    pub seed: u64,
    /// Agent hyperparameters; the baseline uses only `disrc.dqn`.
    pub disrc: DisrcConfig,
    /// `None` means the environment's default clip norm.
    pub grad_clip: Option<f64>,
    pub out_dir: Option<PathBuf>,
    pub checkpoint: bool,
    /// Print each episode's initial grid to stdout. Not part of the file format.
    pub render: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            env: EnvKind::DoorKey8,
            agent: AgentKind::Dqn,
            episodes: None,
            seed: 0,
            disrc: DisrcConfig::default(),
            grad_clip: None,
            out_dir: None,
            checkpoint: false,
            render: false,
        }
    }
}

const KEYS: &[&str] = &[
    "env",
    "agent",
    "episodes",
    "seed",
    "out",
    "checkpoint",
    "gamma",
    "q_lr",
    "tau",
    "batch_size",
    "eps_start",
    "eps_min",
    "eps_decay_fraction",
    "grad_clip",
    "hidden",
    "target_rule",
    "buffer_capacity",
    "beta0",
    "lambda",
    "rho_mu",
    "rho_r",
    "norm_eps",
    "encoder_mode",
    "encoder_lr",
    "modulation",
    "freeze_reward_ema",
];

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    value
        .parse()
        .map_err(|e| Error::Config(format!("{key}: cannot parse '{value}': {e}")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(Error::Config(format!(
            "{key}: expected true or false, got '{value}'"
        ))),
    }
}

impl RunConfig {
    pub fn total_episodes(&self) -> usize {
        self.episodes.unwrap_or_else(|| self.env.default_episodes())
    }

    /// Agent hyperparameters with environment-dependent defaults filled in.
    pub fn agent_config(&self) -> DisrcConfig {
        let mut cfg = self.disrc.clone();
        cfg.dqn.grad_clip_max_norm = self
            .grad_clip
            .unwrap_or_else(|| self.env.default_grad_clip());
        cfg
    }

    pub fn dqn_config(&self) -> DqnConfig {
        self.agent_config().dqn
    }

    pub fn validate(&self) -> Result<()> {
        if self.total_episodes() == 0 {
            return Err(Error::Config("episodes must be at least 1".into()));
        }
        self.agent_config().validate()
    }

    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let d = &mut self.disrc;
        match key {
            "env" => self.env = value.parse()?,
            "agent" => self.agent = value.parse()?,
            "episodes" => self.episodes = Some(parse_value(key, value)?),
            "seed" => self.seed = parse_value(key, value)?,
            "out" => self.out_dir = Some(PathBuf::from(value)),
            "checkpoint" => self.checkpoint = parse_bool(key, value)?,
            "gamma" => d.dqn.gamma = parse_value(key, value)?,
            "q_lr" => d.dqn.q_lr = parse_value(key, value)?,
            "tau" => d.dqn.tau = parse_value(key, value)?,
            "batch_size" => d.dqn.batch_size = parse_value(key, value)?,
            "eps_start" => d.dqn.eps_start = parse_value(key, value)?,
            "eps_min" => d.dqn.eps_min = parse_value(key, value)?,
            "eps_decay_fraction" => d.dqn.eps_decay_fraction = parse_value(key, value)?,
            "grad_clip" => self.grad_clip = Some(parse_value(key, value)?),
            "hidden" => {
                d.dqn.hidden = value
                    .split(',')
                    .map(|w| parse_value(key, w.trim()))
                    .collect::<Result<_>>()?
            }
            "target_rule" => d.dqn.target_rule = value.parse()?,
            "buffer_capacity" => d.dqn.buffer_capacity = parse_value(key, value)?,
            "beta0" => d.beta0 = parse_value(key, value)?,
            "lambda" => d.lambda = parse_value(key, value)?,
            "rho_mu" => d.rho_mu = parse_value(key, value)?,
            "rho_r" => d.rho_r = parse_value(key, value)?,
            "norm_eps" => d.norm_eps = parse_value(key, value)?,
            "encoder_mode" => d.encoder_mode = value.parse()?,
            "encoder_lr" => d.encoder_lr = parse_value(key, value)?,
            "modulation" => d.modulation = value.parse()?,
            "freeze_reward_ema" => d.freeze_reward_ema = parse_bool(key, value)?,
            other => return Err(Error::Config(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    pub fn parse_str(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        let mut seen = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected key = value", lineno + 1))
            })?;
            let (key, value) = (key.trim(), value.trim());
            if seen.contains(&key) {
                return Err(Error::Config(format!(
                    "line {}: duplicate key '{key}'",
                    lineno + 1
                )));
            }
            seen.push(key);
            cfg.set(key, value).map_err(|e| match e {
                Error::Config(m) => Error::Config(format!("line {}: {m}", lineno + 1)),
                other => other,
            })?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_str(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// Every key with its resolved value, one per line, in a fixed order.
    pub fn to_config_string(&self) -> String {
        let a = self.agent_config();
        let q = &a.dqn;
        let hidden: Vec<String> = q.hidden.iter().map(|h| h.to_string()).collect();
        let mut pairs: Vec<(&str, String)> = vec![
            ("env", self.env.to_string()),
            ("agent", self.agent.to_string()),
            ("episodes", self.total_episodes().to_string()),
            ("seed", self.seed.to_string()),
        ];
        if let Some(out) = &self.out_dir {
            pairs.push(("out", out.display().to_string()));
        }
        pairs.extend([
            ("checkpoint", self.checkpoint.to_string()),
            ("gamma", q.gamma.to_string()),
            ("q_lr", q.q_lr.to_string()),
            ("tau", q.tau.to_string()),
            ("batch_size", q.batch_size.to_string()),
            ("eps_start", q.eps_start.to_string()),
            ("eps_min", q.eps_min.to_string()),
            ("eps_decay_fraction", q.eps_decay_fraction.to_string()),
            ("grad_clip", q.grad_clip_max_norm.to_string()),
            ("hidden", hidden.join(",")),
            ("target_rule", q.target_rule.to_string()),
            ("buffer_capacity", q.buffer_capacity.to_string()),
            ("beta0", a.beta0.to_string()),
            ("lambda", a.lambda.to_string()),
            ("rho_mu", a.rho_mu.to_string()),
            ("rho_r", a.rho_r.to_string()),
            ("norm_eps", a.norm_eps.to_string()),
            ("encoder_mode", a.encoder_mode.to_string()),
            ("encoder_lr", a.encoder_lr.to_string()),
            ("modulation", a.modulation.to_string()),
            ("freeze_reward_ema", a.freeze_reward_ema.to_string()),
        ]);
        debug_assert!(pairs.iter().all(|(k, _)| KEYS.contains(k)));
        let mut out = String::new();
        for (k, v) in pairs {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(&v);
            out.push('\n');
        }
        out
    }

    pub fn known_keys() -> &'static [&'static str] {
        KEYS
    }
}
