use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use disrc_core::harness::{self, AgentKind, RunConfig, DEFAULT_SMOOTHING_WINDOW};
use disrc_core::{EnvKind, Error};
use mimalloc::MiMalloc;

// Training allocates and frees multi-hundred-kilobyte matrices every step.
#[global_allocator]
static GLOBAL: MiMalloc = MiMalloc;

#[derive(Parser)]
#[command(
    name = "disrc",
    version,
    about = "Seeded DQN / DISRC gridworld experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train one agent and write episodes.csv, summary.txt and config.txt.
    Train(TrainArgs),
    /// Train two configs over several seeds and tabulate their metrics.
    Compare(CompareArgs),
    /// Train DISRC over a beta0 x lambda grid.
    Sweep(SweepArgs),
    /// Render learning curves from episodes.csv files into one SVG.
    Plot(PlotArgs),
}

#[derive(Args, Clone, Default)]
struct Overrides {
    /// Flat key=value config file; omitted keys take their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    episodes: Option<usize>,
    #[arg(long)]
    agent: Option<AgentKind>,
    #[arg(long)]
    env: Option<EnvKind>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    common: Overrides,
    /// Print every episode's starting grid as ASCII.
    #[arg(long)]
    render: bool,
    /// Save network weights next to the other artifacts.
    #[arg(long)]
    checkpoint: bool,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    common: Overrides,
    /// Second config. Defaults to the first one with the other agent.
    #[arg(long)]
    config_b: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "0,1,2,3,4")]
    seeds: Vec<u64>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Overrides,
    #[arg(long, value_delimiter = ',', required = true)]
    beta0: Vec<f64>,
    #[arg(long, value_delimiter = ',', required = true)]
    lambda: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0,1,2")]
    seeds: Vec<u64>,
}

#[derive(Args)]
struct PlotArgs {
    /// One or more episodes.csv files.
    #[arg(required = true)]
    csv: Vec<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = DEFAULT_SMOOTHING_WINDOW)]
    window: usize,
}

fn load(path: Option<&Path>) -> Result<RunConfig, Error> {
    match path {
        Some(p) => RunConfig::load(p),
        None => Ok(RunConfig::default()),
    }
}

impl Overrides {
    fn apply(&self, mut cfg: RunConfig) -> RunConfig {
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(e) = self.episodes {
            cfg.episodes = Some(e);
        }
        if let Some(a) = self.agent {
            cfg.agent = a;
        }
        if let Some(e) = self.env {
            cfg.env = e;
        }
        if let Some(o) = &self.out {
            cfg.out_dir = Some(o.clone());
        }
        cfg
    }

    fn resolve(&self) -> Result<RunConfig, Error> {
        let cfg = self.apply(load(self.config.as_deref())?);
        cfg.validate()?;
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Train(args) => {
            let mut cfg = args.common.resolve()?;
            cfg.render |= args.render;
            cfg.checkpoint |= args.checkpoint;
            let outcome = harness::train(&cfg)?;
            print!("{}", outcome.summary);
        }
        Command::Compare(args) => {
            let a = args.common.resolve()?;
            let b = match &args.config_b {
                Some(p) => {
                    // The seed, episode, env and out overrides apply to both sides; the agent override does not.
                    let mut shared = args.common.clone();
                    shared.agent = None;
                    shared.apply(RunConfig::load(p)?)
                }
                None => RunConfig {
                    agent: a.agent.other(),
                    ..a.clone()
                },
            };
            let out = a.out_dir.clone();
            let report = harness::compare(&a, &b, &args.seeds, out.as_deref())?;
            print!("{}", report.to_text());
        }
        Command::Sweep(args) => {
            let mut base = args.common.resolve()?;
            base.agent = AgentKind::Disrc;
            let out = base.out_dir.clone();
            let report = harness::sweep(
                &base,
                &args.beta0,
                &args.lambda,
                &args.seeds,
                out.as_deref(),
            )?;
            print!("{}", report.to_text());
        }
        Command::Plot(args) => {
            let paths: Vec<&Path> = args.csv.iter().map(PathBuf::as_path).collect();
            harness::plot(&paths, &args.out, args.window)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) | Error::Usage(_) => ExitCode::from(2),
                _ => ExitCode::FAILURE,
            }
        }
    }
}
