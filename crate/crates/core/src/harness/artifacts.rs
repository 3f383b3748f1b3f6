//! On-disk run artifacts.
//!
//! A run directory holds:
//!
//! - `episodes.csv`: `episode,raw_reward,shaped_reward_sum,steps,mean_loss,epsilon`,
//!   one row per finished episode, reals with 17 significant digits,
//!   `mean_loss` empty when no update ran during the episode
//! - `surprise.csv` (DISRC only): per-episode beta and the range of the
//!   surprise signal
//! - `summary.txt`: run identity and the learning metrics as `key=value`
//! - `config.txt`: the resolved configuration, re-loadable with `--config`
//! - `q_net.bin`, `encoder.bin`: optional checkpoints

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::metrics::EpisodeRecord;

use super::{RunConfig, RunSummary, SurpriseRecord};

pub const EPISODES_HEADER: [&str; 6] = [
    "episode",
    "raw_reward",
    "shaped_reward_sum",
    "steps",
    "mean_loss",
    "epsilon",
];

pub const SURPRISE_HEADER: [&str; 7] = [
    "episode",
    "beta",
    "deviation_min",
    "deviation_max",
    "deviation_mean",
    "bonus_min",
    "bonus_max",
];

/// Positional decimal with 17 significant digits (enough to round-trip any
/// `f64`), e.g. `0.91000000000000003`.
pub fn format_real(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(char::is_ascii_digit).collect();
    let body = if x == 0.0 {
        format!("0.{}", &digits[1..])
    } else if exp < 0 {
        format!("0.{}{}", "0".repeat((-exp - 1) as usize), digits)
    } else if exp as usize >= digits.len() - 1 {
        format!(
            "{}{}.0",
            digits,
            "0".repeat(exp as usize + 1 - digits.len())
        )
    } else {
        let point = exp as usize + 1;
        format!("{}.{}", &digits[..point], &digits[point..])
    };
    if negative {
        format!("-{body}")
    } else {
        body
    }
}

fn csv_writer(path: &Path) -> Result<csv::Writer<File>> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(file))
}

/// Streams per-episode rows so partial runs leave their completed episodes on disk.
pub(crate) struct ArtifactWriter {
    dir: PathBuf,
    episodes: csv::Writer<File>,
    surprise: Option<csv::Writer<File>>,
}

impl ArtifactWriter {
    pub fn create(dir: &Path, config: &RunConfig, with_surprise: bool) -> Result<Self> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        write_config_echo(&dir.join("config.txt"), config)?;
        let mut episodes = csv_writer(&dir.join("episodes.csv"))?;
        episodes.write_record(EPISODES_HEADER)?;
        let surprise = if with_surprise {
            let mut w = csv_writer(&dir.join("surprise.csv"))?;
            w.write_record(SURPRISE_HEADER)?;
            Some(w)
        } else {
            None
        };
        Ok(ArtifactWriter {
            dir: dir.to_path_buf(),
            episodes,
            surprise,
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn episode(&mut self, r: &EpisodeRecord, surprise: Option<&SurpriseRecord>) -> Result<()> {
        self.episodes.write_record([
            r.episode.to_string(),
            format_real(r.raw_reward),
            format_real(r.shaped_reward_sum),
            r.steps.to_string(),
            r.mean_loss.map(format_real).unwrap_or_default(),
            format_real(r.epsilon),
        ])?;
        if let (Some(w), Some(s)) = (self.surprise.as_mut(), surprise) {
            w.write_record([
                s.episode.to_string(),
                format_real(s.beta),
                format_real(s.deviation_min),
                format_real(s.deviation_max),
                format_real(s.deviation_mean),
                format_real(s.bonus_min),
                format_real(s.bonus_max),
            ])?;
        }
        // Long runs are watched through these files.
        self.flush()
    }

    pub fn flush(&mut self) -> Result<()> {
        let path = self.dir.join("episodes.csv");
        self.episodes.flush().map_err(|e| Error::io(&path, e))?;
        if let Some(w) = self.surprise.as_mut() {
            w.flush()
                .map_err(|e| Error::io(self.dir.join("surprise.csv"), e))?;
        }
        Ok(())
    }
}

fn write_config_echo(path: &Path, config: &RunConfig) -> Result<()> {
    let stamp = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let text = format!(
        "# resolved run configuration\n# written at unix time {stamp}\n{}",
        config.to_config_string()
    );
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn opt_real(x: Option<f64>) -> String {
    x.map(format_real).unwrap_or_else(|| "none".into())
}

fn opt_int(x: Option<usize>) -> String {
    x.map(|v| v.to_string()).unwrap_or_else(|| "none".into())
}

impl RunSummary {
    pub fn to_summary_string(&self) -> String {
        let m = &self.metrics;
        let lines = [
            ("agent", self.agent.to_string()),
            ("env", self.env.to_string()),
            ("seed", self.seed.to_string()),
            ("total_episodes", self.total_episodes.to_string()),
            ("mean_final_reward", format_real(m.mean_final_reward)),
            ("episodes_to_threshold", opt_int(m.episodes_to_threshold)),
            ("loss_variance", opt_real(m.loss_variance)),
            ("reward_std", format_real(m.reward_std)),
            ("auc", opt_real(m.auc)),
            ("first_success", opt_int(m.first_success)),
        ];
        lines.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        w.write_all(self.to_summary_string().as_bytes())
            .and_then(|_| w.flush())
            .map_err(|e| Error::io(path, e))
    }
}

/// `(episode, raw_reward)` pairs from an `episodes.csv`.
pub fn read_episode_rewards(path: &Path) -> Result<Vec<(usize, f64)>> {
    let parse_err = |message: String| Error::Parse {
        path: path.to_path_buf(),
        message,
    };
    let mut reader = csv::Reader::from_path(path).map_err(|e| parse_err(e.to_string()))?;
    let headers = reader
        .headers()
        .map_err(|e| parse_err(e.to_string()))?
        .clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| parse_err(format!("missing column '{name}'")))
    };
    let (ep_col, reward_col) = (col("episode")?, col("raw_reward")?);
    let mut out = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let row = row.map_err(|e| parse_err(e.to_string()))?;
        let field = |c: usize| row.get(c).unwrap_or("");
        let episode = field(ep_col)
            .parse()
            .map_err(|_| parse_err(format!("row {}: bad episode '{}'", i + 1, field(ep_col))))?;
        let reward = field(reward_col).parse().map_err(|_| {
            parse_err(format!(
                "row {}: bad raw_reward '{}'",
                i + 1,
                field(reward_col)
            ))
        })?;
        out.push((episode, reward));
    }
    Ok(out)
}
