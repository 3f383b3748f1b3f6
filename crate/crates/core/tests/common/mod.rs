//! Oracles and fixtures shared by the integration tests and the acceptance binary.

#![allow(dead_code, clippy::needless_range_loop)]

use disrc_core::gridworld::{CellKind, Direction};
use disrc_core::nn::{Layer, MlpBuilder};
use disrc_core::rng::seeded;
use disrc_core::{
    Action, DqnAgent, DqnConfig, GridState, Matrix, Mlp, ReplayBuffer, Rng, Transition,
};
use rand::Rng as _;

pub type Check = std::result::Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    };
}

// ---------------------------------------------------------------------------
// Network gradients

/// Reference forward pass written directly from the layer definitions.
/// Returns the output and every ReLU input seen on the way.
pub fn oracle_forward(net: &Mlp, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let p = net.params();
    let mut h = x.to_vec();
    let mut relu_inputs = Vec::new();
    for layer in net.layers() {
        h = match *layer {
            Layer::Dense {
                input,
                output,
                offset,
            } => (0..output)
                .map(|o| {
                    let row = &p[offset + o * input..offset + (o + 1) * input];
                    p[offset + input * output + o]
                        + row.iter().zip(&h).map(|(w, v)| w * v).sum::<f64>()
                })
                .collect(),
            Layer::LayerNorm { dim, eps, offset } => {
                let mean = h.iter().sum::<f64>() / dim as f64;
                let var = h.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / dim as f64;
                (0..dim)
                    .map(|i| {
                        p[offset + i] * (h[i] - mean) / (var + eps).sqrt() + p[offset + dim + i]
                    })
                    .collect()
            }
            Layer::Relu { .. } => {
                relu_inputs.extend_from_slice(&h);
                h.iter().map(|v| v.max(0.0)).collect()
            }
        };
    }
    (h, relu_inputs)
}

/// Random net of at most four dense layers, each hidden one followed by
/// LayerNorm and ReLU, widths at most 16.
pub fn random_net(rng: &mut Rng) -> Mlp {
    let input = rng.random_range(1..=16);
    let hidden = rng.random_range(1..=3);
    let mut b = MlpBuilder::new(input);
    for _ in 0..hidden {
        b = b.dense(rng.random_range(2..=16)).layer_norm().relu();
    }
    let mut net = b.dense(rng.random_range(1..=16)).build(rng).unwrap();
    // Non-trivial LayerNorm gains and biases.
    let layers = net.layers().to_vec();
    let params = net.params_mut();
    for layer in layers {
        if let Layer::LayerNorm { dim, offset, .. } = layer {
            for v in &mut params[offset..offset + 2 * dim] {
                *v = rng.random_range(-1.5..1.5);
            }
        }
    }
    net
}

pub struct GradCheck {
    pub max_rel_error: f64,
    pub params_checked: usize,
}

const KINK_MARGIN: f64 = 1e-3;

fn rel_error(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-6)
}

/// Draws a batch whose ReLU inputs all stay at least `KINK_MARGIN` away from zero.
fn batch_away_from_kinks(net: &Mlp, rng: &mut Rng) -> Option<Matrix> {
    let rows = rng.random_range(1..=4);
    let mut data = Vec::with_capacity(rows * net.input_dim());
    for _ in 0..rows {
        let row = (0..200).find_map(|_| {
            let x: Vec<f64> = (0..net.input_dim())
                .map(|_| rng.random_range(-1.0..1.0))
                .collect();
            let (_, z) = oracle_forward(net, &x);
            z.iter().all(|v| v.abs() > KINK_MARGIN).then_some(x)
        })?;
        data.extend(row);
    }
    Some(Matrix::from_vec(rows, net.input_dim(), data).unwrap())
}

/// Scalar objective `sum(c * net(x))` with fixed random weights `c`.
fn objective(net: &Mlp, x: &Matrix, c: &Matrix) -> f64 {
    (0..x.rows())
        .map(|r| {
            let (y, _) = oracle_forward(net, x.row(r));
            y.iter().zip(c.row(r)).map(|(a, b)| a * b).sum::<f64>()
        })
        .sum()
}

/// Central-difference check of parameter and input gradients on one random net.
pub fn gradient_check(rng: &mut Rng, h: f64) -> GradCheck {
    let (mut net, x) = loop {
        let net = random_net(rng);
        if let Some(x) = batch_away_from_kinks(&net, rng) {
            break (net, x);
        }
    };
    let c_data = (0..x.rows() * net.output_dim())
        .map(|_| rng.random_range(-1.0..1.0))
        .collect();
    let c = Matrix::from_vec(x.rows(), net.output_dim(), c_data).unwrap();
    let (_, cache) = net.forward(&x).unwrap();
    let (grads, d_in) = net.backward(cache, &c).unwrap();

    let mut worst: f64 = 0.0;
    for i in 0..net.param_count() {
        let orig = net.params()[i];
        net.params_mut()[i] = orig + h;
        let plus = objective(&net, &x, &c);
        net.params_mut()[i] = orig - h;
        let minus = objective(&net, &x, &c);
        net.params_mut()[i] = orig;
        worst = worst.max(rel_error(grads[i], (plus - minus) / (2.0 * h)));
    }
    let mut xp = x.clone();
    for i in 0..x.as_slice().len() {
        let orig = x.as_slice()[i];
        xp.as_mut_slice()[i] = orig + h;
        let plus = objective(&net, &xp, &c);
        xp.as_mut_slice()[i] = orig - h;
        let minus = objective(&net, &xp, &c);
        xp.as_mut_slice()[i] = orig;
        worst = worst.max(rel_error(d_in.as_slice()[i], (plus - minus) / (2.0 * h)));
    }
    GradCheck {
        max_rel_error: worst,
        params_checked: net.param_count(),
    }
}

// ---------------------------------------------------------------------------
// Metric oracles

pub fn oracle_auc(r: &[f64]) -> f64 {
    let n = r.len();
    let interior: f64 = r[1..n - 1].iter().sum();
    interior + 0.5 * (r[0] + r[n - 1])
}

/// Population variance from all pairwise squared differences.
pub fn oracle_variance(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mut s = 0.0;
    for a in x {
        for b in x {
            s += (a - b) * (a - b);
        }
    }
    s / (2.0 * n * n)
}

pub fn oracle_threshold(r: &[f64], threshold: f64) -> Option<usize> {
    let mut i = 0;
    while i < r.len() {
        if r[i] > threshold {
            return Some(i + 1);
        }
        i += 1;
    }
    None
}

/// Reward-like sequence: sparse successes, plateaus, and plain noise.
pub fn random_sequence(rng: &mut Rng) -> Vec<f64> {
    let n = rng.random_range(2..=400);
    match rng.random_range(0..4) {
        0 => (0..n)
            .map(|_| {
                if rng.random::<f64>() < 0.3 {
                    rng.random_range(0.05..1.0)
                } else {
                    0.0
                }
            })
            .collect(),
        1 => vec![rng.random_range(0.0..1.0); n],
        2 => (0..n).map(|_| rng.random_range(0.0..1.0)).collect(),
        _ => (0..n)
            .map(|_| rng.random_range(0.0..5.0f64).powi(2))
            .collect(),
    }
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

// ---------------------------------------------------------------------------
// Two-state chain

/// State 0 moves to state 1 with reward `0.1 a - 0.3`; state 1 ends the
/// episode with reward `0.25 (a mod 3)`.
pub struct ChainMdp {
    pub gamma: f64,
}

impl ChainMdp {
    pub fn obs(state: usize) -> Vec<f64> {
        let mut o = vec![0.0; 2];
        o[state] = 1.0;
        o
    }

    pub fn reward(state: usize, a: usize) -> f64 {
        if state == 0 {
            0.1 * a as f64 - 0.3
        } else {
            0.25 * (a % 3) as f64
        }
    }

    pub fn optimal_q(&self, state: usize, a: usize) -> f64 {
        let best_terminal = (0..7).map(|b| Self::reward(1, b)).fold(f64::MIN, f64::max);
        if state == 0 {
            Self::reward(0, a) + self.gamma * best_terminal
        } else {
            Self::reward(1, a)
        }
    }
}

pub struct ChainResult {
    /// First step after which the error stayed within tolerance to the end.
    pub settled_at: Option<usize>,
    pub final_error: f64,
}

pub fn chain_config() -> DqnConfig {
    DqnConfig {
        hidden: vec![32],
        q_lr: 1e-3,
        tau: 0.05,
        batch_size: 32,
        buffer_capacity: 2_000,
        grad_clip_max_norm: 10.0,
        ..DqnConfig::default()
    }
}

fn chain_error(agent: &DqnAgent, mdp: &ChainMdp) -> f64 {
    let mut worst: f64 = 0.0;
    for s in 0..2 {
        let q = agent.q_values(&ChainMdp::obs(s)).unwrap();
        for (a, v) in q.iter().enumerate() {
            worst = worst.max((v - mdp.optimal_q(s, a)).abs());
        }
    }
    worst
}

/// Uniform exploration through the agent's epsilon-greedy path, real replay,
/// one update and one soft target update per step.
pub fn run_chain(seed: u64, steps: usize, tol: f64) -> ChainResult {
    run_chain_with(chain_config(), seed, steps, tol)
}

pub fn run_chain_with(config: DqnConfig, seed: u64, steps: usize, tol: f64) -> ChainResult {
    let mdp = ChainMdp {
        gamma: config.gamma,
    };
    let mut rng = seeded(seed);
    let mut agent = DqnAgent::new(2, config.clone(), &mut rng).unwrap();
    let mut buffer = ReplayBuffer::new(config.buffer_capacity);
    let mut state = 0;
    let mut settled_at = None;
    let mut err = f64::INFINITY;
    for step in 1..=steps {
        let action = agent
            .select_action(&ChainMdp::obs(state), 1.0, &mut rng)
            .unwrap();
        let a = action.index();
        let done = state == 1;
        let next = if done { 0 } else { 1 };
        buffer.push(Transition {
            obs: ChainMdp::obs(state),
            action,
            reward: ChainMdp::reward(state, a),
            next_obs: ChainMdp::obs(next),
            done,
            deviation: 0.0,
        });
        state = next;
        if agent.train_step(&buffer, &mut rng).unwrap().is_some() {
            agent.soft_update().unwrap();
        }
        err = chain_error(&agent, &mdp);
        if err < tol {
            settled_at.get_or_insert(step);
        } else {
            settled_at = None;
        }
    }
    ChainResult {
        settled_at,
        final_error: err,
    }
}

// ---------------------------------------------------------------------------
// Environment traces

pub const GOAL_TOL: f64 = 1e-12;

fn grid(map: &str, max_steps: u32) -> GridState {
    GridState::parse(map, max_steps).unwrap()
}

fn step(env: &mut GridState, a: Action) -> Result<disrc_core::StepResult, String> {
    env.step(a).map_err(|e| e.to_string())
}

fn steps(env: &mut GridState, actions: &[Action]) -> Result<(), String> {
    for &a in actions {
        let r = step(env, a)?;
        ensure!(
            r.reward == 0.0 && !r.terminated,
            "unexpected reward or end during {a:?}"
        );
    }
    Ok(())
}

const CORRIDOR: &str = "
    #######
    #>....#
    #######";

const DOORKEY: &str = "
    ######
    #.K#.#
    #^.D.#
    #..#G#
    ######";

fn forward_into_wall() -> Check {
    let mut env = grid(
        "
        ####
        #>.#
        ####",
        20,
    );
    step(&mut env, Action::Forward)?;
    let r = step(&mut env, Action::Forward)?;
    ensure!(
        env.agent_pos() == (2, 1),
        "walked into the wall: {:?}",
        env.agent_pos()
    );
    ensure!(
        r.reward == 0.0 && !r.terminated && !r.truncated,
        "wall bump ended the episode"
    );
    Ok(())
}

fn forward_into_locked_door() -> Check {
    let mut env = grid(DOORKEY, 50);
    steps(&mut env, &[Action::TurnRight, Action::Forward])?;
    ensure!(
        env.agent_pos() == (2, 2),
        "setup failed at {:?}",
        env.agent_pos()
    );
    step(&mut env, Action::Forward)?;
    ensure!(env.agent_pos() == (2, 2), "passed a locked door");
    ensure!(env.cell(3, 2).kind == CellKind::LockedDoor, "door changed");
    Ok(())
}

fn forward_into_key() -> Check {
    let mut env = grid(DOORKEY, 50);
    steps(
        &mut env,
        &[Action::Forward, Action::TurnRight, Action::Forward],
    )?;
    ensure!(
        env.agent_pos() == (1, 1),
        "key cell was entered: {:?}",
        env.agent_pos()
    );
    Ok(())
}

fn left_turns_cycle() -> Check {
    let mut env = grid(CORRIDOR, 50);
    let dirs = [
        Direction::North,
        Direction::West,
        Direction::South,
        Direction::East,
    ];
    for d in dirs {
        step(&mut env, Action::TurnLeft)?;
        ensure!(
            env.agent_dir() == d,
            "expected {d:?}, got {:?}",
            env.agent_dir()
        );
    }
    ensure!(env.agent_pos() == (1, 1), "turning moved the agent");
    Ok(())
}

fn right_turns_cycle() -> Check {
    let mut env = grid(CORRIDOR, 50);
    let dirs = [
        Direction::South,
        Direction::West,
        Direction::North,
        Direction::East,
    ];
    for d in dirs {
        step(&mut env, Action::TurnRight)?;
        ensure!(
            env.agent_dir() == d,
            "expected {d:?}, got {:?}",
            env.agent_dir()
        );
    }
    Ok(())
}

fn corridor_walk() -> Check {
    let mut env = grid(CORRIDOR, 50);
    for x in 2..=5 {
        step(&mut env, Action::Forward)?;
        ensure!(
            env.agent_pos() == (x, 1),
            "expected x={x}, at {:?}",
            env.agent_pos()
        );
    }
    step(&mut env, Action::Forward)?;
    ensure!(env.agent_pos() == (5, 1), "left the corridor");
    ensure!(env.step_count() == 5, "step count {}", env.step_count());
    Ok(())
}

fn pickup_key() -> Check {
    let mut env = grid(DOORKEY, 50);
    steps(
        &mut env,
        &[Action::Forward, Action::TurnRight, Action::Pickup],
    )?;
    ensure!(
        env.carrying().is_some_and(|c| c.kind == CellKind::Key),
        "not carrying a key"
    );
    ensure!(
        env.cell(2, 1).kind == CellKind::Empty,
        "key still on the floor"
    );
    step(&mut env, Action::Forward)?;
    ensure!(
        env.agent_pos() == (2, 1),
        "could not step onto the emptied cell"
    );
    Ok(())
}

fn pickup_nothing() -> Check {
    let mut env = grid(CORRIDOR, 50);
    step(&mut env, Action::Pickup)?;
    ensure!(env.carrying().is_none(), "picked up empty floor");
    let mut env = grid(DOORKEY, 50);
    steps(&mut env, &[Action::TurnLeft, Action::Pickup])?;
    ensure!(env.carrying().is_none(), "picked up a wall");
    ensure!(env.cell(0, 2).kind == CellKind::Wall, "wall removed");
    Ok(())
}

fn pickup_while_carrying() -> Check {
    let mut env = grid(
        "
        #####
        #K>K#
        #####",
        50,
    );
    step(&mut env, Action::Pickup)?;
    steps(
        &mut env,
        &[Action::TurnLeft, Action::TurnLeft, Action::Pickup],
    )?;
    ensure!(env.cell(1, 1).kind == CellKind::Key, "second key was taken");
    ensure!(
        env.cell(3, 1).kind == CellKind::Empty,
        "first key not taken"
    );
    Ok(())
}

fn toggle_without_key() -> Check {
    let mut env = grid(DOORKEY, 50);
    steps(
        &mut env,
        &[
            Action::TurnRight,
            Action::Forward,
            Action::Toggle,
            Action::Forward,
        ],
    )?;
    ensure!(
        env.cell(3, 2).kind == CellKind::LockedDoor,
        "door opened without a key"
    );
    ensure!(env.agent_pos() == (2, 2), "passed the locked door");
    Ok(())
}

fn toggle_with_key_opens_door() -> Check {
    let mut env = grid(DOORKEY, 50);
    steps(
        &mut env,
        &[
            Action::Forward,
            Action::TurnRight,
            Action::Pickup,
            Action::TurnRight,
            Action::Forward,
            Action::TurnLeft,
            Action::Forward,
            Action::Toggle,
        ],
    )?;
    ensure!(
        env.cell(3, 2).kind == CellKind::OpenDoor,
        "door still {:?}",
        env.cell(3, 2).kind
    );
    ensure!(env.carrying().is_some(), "key consumed by the door");
    step(&mut env, Action::Forward)?;
    ensure!(env.agent_pos() == (3, 2), "could not enter the open door");
    step(&mut env, Action::Forward)?;
    ensure!(env.agent_pos() == (4, 2), "could not pass the open door");
    Ok(())
}

fn toggle_open_door_is_noop() -> Check {
    let mut env = grid(
        "
        #####
        #>/.#
        #####",
        50,
    );
    step(&mut env, Action::Toggle)?;
    ensure!(
        env.cell(2, 1).kind == CellKind::OpenDoor,
        "open door changed state"
    );
    steps(&mut env, &[Action::Forward, Action::Forward])?;
    ensure!(env.agent_pos() == (3, 1), "open door blocked movement");
    Ok(())
}

fn drop_key() -> Check {
    let mut env = grid(DOORKEY, 50);
    steps(
        &mut env,
        &[
            Action::Forward,
            Action::TurnRight,
            Action::Pickup,
            Action::TurnRight,
            Action::Drop,
        ],
    )?;
    ensure!(env.carrying().is_none(), "still carrying after drop");
    ensure!(env.cell(1, 2).kind == CellKind::Key, "key not on the floor");
    step(&mut env, Action::Forward)?;
    ensure!(env.agent_pos() == (1, 1), "walked onto the dropped key");
    Ok(())
}

fn drop_onto_wall() -> Check {
    let mut env = grid(DOORKEY, 50);
    steps(
        &mut env,
        &[
            Action::Forward,
            Action::TurnRight,
            Action::Pickup,
            Action::TurnLeft,
            Action::Drop,
        ],
    )?;
    ensure!(env.carrying().is_some(), "dropped the key into a wall");
    ensure!(env.cell(1, 0).kind == CellKind::Wall, "wall replaced");
    Ok(())
}

fn done_is_noop() -> Check {
    let mut env = grid(CORRIDOR, 50);
    let r = step(&mut env, Action::Done)?;
    ensure!(
        !r.terminated && !r.truncated && r.reward == 0.0,
        "done ended the episode"
    );
    ensure!(
        env.agent_pos() == (1, 1) && env.step_count() == 1,
        "done changed state"
    );
    Ok(())
}

fn lava_terminates_without_reward() -> Check {
    let mut env = grid(
        "
        #####
        #>LG#
        #####",
        50,
    );
    let r = step(&mut env, Action::Forward)?;
    ensure!(r.terminated && !r.truncated, "lava did not terminate");
    ensure!(r.reward == 0.0, "lava reward {}", r.reward);
    ensure!(
        env.step(Action::Forward).is_err(),
        "stepping a finished episode succeeded"
    );
    Ok(())
}

fn lava_on_last_step_is_termination() -> Check {
    let mut env = grid(
        "
        ####
        #>L#
        ####",
        3,
    );
    steps(&mut env, &[Action::TurnLeft, Action::TurnRight])?;
    let r = step(&mut env, Action::Forward)?;
    ensure!(r.terminated && !r.truncated && r.reward == 0.0, "{r:?}");
    Ok(())
}

fn goal_on_first_step() -> Check {
    let mut env = grid(
        "
        ####
        #>G#
        ####",
        100,
    );
    let r = step(&mut env, Action::Forward)?;
    let expected = 1.0 - 0.9 * (1.0 / 100.0);
    ensure!(r.terminated && !r.truncated, "goal did not terminate");
    ensure!(
        (r.reward - expected).abs() < GOAL_TOL,
        "reward {} vs {expected}",
        r.reward
    );
    Ok(())
}

fn goal_after_detour() -> Check {
    let mut env = grid(
        "
        #####
        #>..#
        #..G#
        #####",
        37,
    );
    steps(
        &mut env,
        &[
            Action::TurnLeft,
            Action::TurnRight,
            Action::Forward,
            Action::Done,
            Action::Forward,
            Action::TurnRight,
        ],
    )?;
    let r = step(&mut env, Action::Forward)?;
    let expected = 1.0 - 0.9 * (7.0 / 37.0);
    ensure!(r.terminated, "goal did not terminate");
    ensure!(
        (r.reward - expected).abs() < GOAL_TOL,
        "reward {} vs {expected}",
        r.reward
    );
    Ok(())
}

fn goal_on_last_step() -> Check {
    let mut env = grid(
        "
        ####
        #>G#
        ####",
        4,
    );
    steps(&mut env, &[Action::Done, Action::Done, Action::Done])?;
    let r = step(&mut env, Action::Forward)?;
    ensure!(
        r.terminated && !r.truncated,
        "final-step goal flagged {r:?}"
    );
    ensure!((r.reward - 0.1).abs() < GOAL_TOL, "reward {}", r.reward);
    Ok(())
}

fn truncation_at_max_steps() -> Check {
    let mut env = grid(CORRIDOR, 5);
    for i in 1..=5u32 {
        let r = step(&mut env, Action::TurnLeft)?;
        ensure!(
            r.truncated == (i == 5),
            "truncated={} at step {i}",
            r.truncated
        );
        ensure!(!r.terminated && r.reward == 0.0, "terminated at step {i}");
    }
    ensure!(
        env.step(Action::TurnLeft).is_err(),
        "stepping past truncation succeeded"
    );
    Ok(())
}

fn doorkey_solution() -> Check {
    let mut env = grid(DOORKEY, 60);
    steps(
        &mut env,
        &[
            Action::Forward,
            Action::TurnRight,
            Action::Pickup,
            Action::TurnRight,
            Action::Forward,
            Action::TurnLeft,
            Action::Forward,
            Action::Toggle,
            Action::Forward,
            Action::Forward,
            Action::TurnRight,
        ],
    )?;
    let r = step(&mut env, Action::Forward)?;
    let expected = 1.0 - 0.9 * (12.0 / 60.0);
    ensure!(env.agent_pos() == (4, 3), "ended at {:?}", env.agent_pos());
    ensure!(r.terminated, "goal not reached");
    ensure!(
        (r.reward - expected).abs() < GOAL_TOL,
        "reward {} vs {expected}",
        r.reward
    );
    Ok(())
}

fn observation_tracks_pickup() -> Check {
    let mut env = grid(DOORKEY, 50);
    steps(&mut env, &[Action::Forward, Action::TurnRight])?;
    // Key straight ahead: view cell (3, 5); own cell (3, 6) is empty.
    let before = env.view_codes();
    ensure!(
        before[3][5] == [5, 4, 0],
        "front cell codes {:?}",
        before[3][5]
    );
    ensure!(
        before[3][6] == [1, 0, 0],
        "own cell codes {:?}",
        before[3][6]
    );
    step(&mut env, Action::Pickup)?;
    let after = env.view_codes();
    ensure!(
        after[3][5] == [1, 0, 0],
        "front cell after pickup {:?}",
        after[3][5]
    );
    ensure!(
        after[3][6] == [5, 4, 0],
        "carried key not shown {:?}",
        after[3][6]
    );
    Ok(())
}

pub type Trace = (&'static str, fn() -> Check);

pub fn env_traces() -> Vec<Trace> {
    vec![
        ("forward into wall is blocked", forward_into_wall),
        (
            "forward into locked door is blocked",
            forward_into_locked_door,
        ),
        ("forward into key is blocked", forward_into_key),
        ("left turns cycle", left_turns_cycle),
        ("right turns cycle", right_turns_cycle),
        ("corridor walk stops at wall", corridor_walk),
        ("pickup key", pickup_key),
        ("pickup of wall or floor is a no-op", pickup_nothing),
        ("pickup while carrying is a no-op", pickup_while_carrying),
        ("toggle without key keeps door locked", toggle_without_key),
        ("toggle with key opens door", toggle_with_key_opens_door),
        ("toggle on open door is a no-op", toggle_open_door_is_noop),
        ("drop key on floor", drop_key),
        ("drop into wall is a no-op", drop_onto_wall),
        ("done is a no-op", done_is_noop),
        (
            "lava terminates with zero reward",
            lava_terminates_without_reward,
        ),
        (
            "lava on the last step is termination",
            lava_on_last_step_is_termination,
        ),
        ("goal on first step", goal_on_first_step),
        ("goal after a detour", goal_after_detour),
        ("goal on the last step", goal_on_last_step),
        ("truncation at max_steps", truncation_at_max_steps),
        ("full door-key solution", doorkey_solution),
        ("observation tracks pickup", observation_tracks_pickup),
    ]
}
