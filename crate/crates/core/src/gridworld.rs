//! DoorKey and LavaCrossing gridworlds with MiniGrid action and reward semantics.
//!
//! Coordinates are `(x, y)` with `x` growing east and `y` growing south. The
//! outer ring of every grid is wall. Episodes are generated from a `u64` seed
//! and are byte-for-byte reproducible.
//!
//! Observations are the egocentric 7x7 view in front of the agent, three
//! integer channels per cell (object, color, state) divided by their maxima
//! `(10, 5, 2)`. Unlike upstream MiniGrid there is no occlusion: the whole
//! crop is visible.

use std::fmt;
use std::str::FromStr;

use rand::Rng as _;

use crate::error::{Error, Result};
use crate::rng;

pub const VIEW_SIZE: usize = 7;
pub const OBS_CHANNELS: usize = 3;
pub const OBS_DIM: usize = VIEW_SIZE * VIEW_SIZE * OBS_CHANNELS;
pub const NUM_ACTIONS: usize = 7;

/// Per-channel maxima used to bring the raw codes into `[0, 1]`.
pub const CHANNEL_MAX: [f64; OBS_CHANNELS] = [10.0, 5.0, 2.0];

const SUCCESS_PENALTY: f64 = 0.9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CellKind {
    Empty,
    Wall,
    LockedDoor,
    OpenDoor,
    Key,
    Goal,
    Lava,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Color {
    Red,
    Green,
    Blue,
    Purple,
    Yellow,
    Grey,
}

impl Color {
    pub fn index(self) -> u8 {
        self as u8
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Cell {
    pub kind: CellKind,
    pub color: Color,
}

impl Cell {
    pub const EMPTY: Cell = Cell::new(CellKind::Empty, Color::Red);
    pub const WALL: Cell = Cell::new(CellKind::Wall, Color::Grey);
    pub const GOAL: Cell = Cell::new(CellKind::Goal, Color::Green);
    pub const LAVA: Cell = Cell::new(CellKind::Lava, Color::Red);

    pub const fn new(kind: CellKind, color: Color) -> Self {
        Cell { kind, color }
    }

    pub const fn key(color: Color) -> Self {
        Cell::new(CellKind::Key, color)
    }

    pub const fn locked_door(color: Color) -> Self {
        Cell::new(CellKind::LockedDoor, color)
    }

    /// Whether the agent may stand on this cell.
    pub fn can_overlap(&self) -> bool {
        matches!(
            self.kind,
            CellKind::Empty | CellKind::OpenDoor | CellKind::Goal | CellKind::Lava
        )
    }

    /// MiniGrid `(object, color, state)` codes.
    pub fn encode(&self) -> [u8; 3] {
        match self.kind {
            CellKind::Empty => [1, 0, 0],
            CellKind::Wall => [2, self.color.index(), 0],
            CellKind::OpenDoor => [4, self.color.index(), 0],
            CellKind::LockedDoor => [4, self.color.index(), 2],
            CellKind::Key => [5, self.color.index(), 0],
            CellKind::Goal => [8, self.color.index(), 0],
            CellKind::Lava => [9, self.color.index(), 0],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    East,
    South,
    West,
    North,
}

impl Direction {
    const ALL: [Direction; 4] = [
        Direction::East,
        Direction::South,
        Direction::West,
        Direction::North,
    ];

    pub fn from_index(i: usize) -> Self {
        Self::ALL[i % 4]
    }

    pub fn vec(self) -> (i64, i64) {
        match self {
            Direction::East => (1, 0),
            Direction::South => (0, 1),
            Direction::West => (-1, 0),
            Direction::North => (0, -1),
        }
    }

    fn turn_left(self) -> Self {
        Self::from_index(self as usize + 3)
    }

    fn turn_right(self) -> Self {
        Self::from_index(self as usize + 1)
    }

    fn glyph(self) -> char {
        match self {
            Direction::East => '>',
            Direction::South => 'v',
            Direction::West => '<',
            Direction::North => '^',
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Action {
    TurnLeft = 0,
    TurnRight = 1,
    Forward = 2,
    Pickup = 3,
    Drop = 4,
    Toggle = 5,
    Done = 6,
}

impl Action {
    pub const ALL: [Action; NUM_ACTIONS] = [
        Action::TurnLeft,
        Action::TurnRight,
        Action::Forward,
        Action::Pickup,
        Action::Drop,
        Action::Toggle,
        Action::Done,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Result<Self> {
        Self::ALL
            .get(i)
            .copied()
            .ok_or_else(|| Error::Usage(format!("action index {i} out of range 0..{NUM_ACTIONS}")))
    }
}

/// Flattened, normalized 7x7x3 egocentric view.
///
/// Layout is `[view_x][view_y][channel]` flattened row-major, so the value for
/// view cell `(vx, vy)` and channel `c` lives at `(vx * 7 + vy) * 3 + c`. The
/// agent sits at view cell `(3, 6)` looking towards `vy = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct Observation(Vec<f64>);

impl Observation {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() != OBS_DIM {
            return Err(Error::shape(OBS_DIM, values.len()));
        }
        if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::Usage(format!(
                "observation component {v} outside [0, 1]"
            )));
        }
        Ok(Observation(values))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn index_of(view_x: usize, view_y: usize, channel: usize) -> usize {
        (view_x * VIEW_SIZE + view_y) * OBS_CHANNELS + channel
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepResult {
    pub obs: Observation,
    pub reward: f64,
    pub terminated: bool,
    pub truncated: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EnvKind {
    DoorKey8,
    LavaCrossing9,
}

impl EnvKind {
    pub fn reset(self, seed: u64) -> GridState {
        match self {
            EnvKind::DoorKey8 => reset_doorkey(seed, 8),
            EnvKind::LavaCrossing9 => reset_lavacrossing(seed, 9, 1),
        }
        .expect("built-in environment parameters are valid")
    }

    pub fn name(self) -> &'static str {
        match self {
            EnvKind::DoorKey8 => "doorkey8",
            EnvKind::LavaCrossing9 => "lavacrossing9",
        }
    }

    /// Episode budget used when a config does not set one.
    pub fn default_episodes(self) -> usize {
        match self {
            EnvKind::DoorKey8 => 700,
            EnvKind::LavaCrossing9 => 1200,
        }
    }

    /// Gradient clip norm used when a config does not set one.
    pub fn default_grad_clip(self) -> f64 {
        match self {
            EnvKind::DoorKey8 => 0.3,
            EnvKind::LavaCrossing9 => 0.2,
        }
    }
}

impl fmt::Display for EnvKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EnvKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "doorkey8" => Ok(EnvKind::DoorKey8),
            "lavacrossing9" => Ok(EnvKind::LavaCrossing9),
            other => Err(Error::Config(format!(
                "unknown env '{other}' (expected doorkey8 or lavacrossing9)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GridState {
    width: usize,
    height: usize,
    cells: Vec<Cell>,
    agent_pos: (usize, usize),
    agent_dir: Direction,
    carrying: Option<Cell>,
    step_count: u32,
    max_steps: u32,
    terminated: bool,
    truncated: bool,
}

impl GridState {
    fn walled(width: usize, height: usize, max_steps: u32) -> Self {
        let mut cells = vec![Cell::EMPTY; width * height];
        for y in 0..height {
            for x in 0..width {
                if x == 0 || y == 0 || x == width - 1 || y == height - 1 {
                    cells[y * width + x] = Cell::WALL;
                }
            }
        }
        GridState {
            width,
            height,
            cells,
            agent_pos: (1, 1),
            agent_dir: Direction::East,
            carrying: None,
            step_count: 0,
            max_steps,
            terminated: false,
            truncated: false,
        }
    }

    /// Builds a grid from the same character legend [`render`](Self::render) emits.
    ///
    /// `#` wall, `.` empty, `D` locked yellow door, `/` open yellow door,
    /// `K` yellow key, `G` goal, `L` lava, and one of `> v < ^` for the agent
    /// (standing on an empty cell).
    pub fn parse(map: &str, max_steps: u32) -> Result<Self> {
        let rows: Vec<&str> = map
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .collect();
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.chars().count());
        if width < 3 || height < 3 {
            return Err(Error::Config("fixture grid must be at least 3x3".into()));
        }
        if max_steps == 0 {
            return Err(Error::Config("max_steps must be positive".into()));
        }
        let mut state = GridState::walled(width, height, max_steps);
        let mut agent = None;
        for (y, row) in rows.iter().enumerate() {
            if row.chars().count() != width {
                return Err(Error::Config(format!("fixture row {y} has ragged width")));
            }
            for (x, ch) in row.chars().enumerate() {
                let cell = match ch {
                    '#' => Cell::WALL,
                    '.' => Cell::EMPTY,
                    'D' => Cell::locked_door(Color::Yellow),
                    '/' => Cell::new(CellKind::OpenDoor, Color::Yellow),
                    'K' => Cell::key(Color::Yellow),
                    'G' => Cell::GOAL,
                    'L' => Cell::LAVA,
                    '>' | 'v' | '<' | '^' => {
                        if agent.is_some() {
                            return Err(Error::Config("fixture has more than one agent".into()));
                        }
                        let dir = match ch {
                            '>' => Direction::East,
                            'v' => Direction::South,
                            '<' => Direction::West,
                            _ => Direction::North,
                        };
                        agent = Some(((x, y), dir));
                        Cell::EMPTY
                    }
                    other => return Err(Error::Config(format!("unknown fixture glyph '{other}'"))),
                };
                let border = x == 0 || y == 0 || x == width - 1 || y == height - 1;
                if border && cell != Cell::WALL {
                    return Err(Error::Config(format!("border cell ({x}, {y}) is not wall")));
                }
                state.cells[y * width + x] = cell;
            }
        }
        let (pos, dir) = agent.ok_or_else(|| Error::Config("fixture has no agent".into()))?;
        state.agent_pos = pos;
        state.agent_dir = dir;
        Ok(state)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn agent_pos(&self) -> (usize, usize) {
        self.agent_pos
    }

    pub fn agent_dir(&self) -> Direction {
        self.agent_dir
    }

    pub fn carrying(&self) -> Option<Cell> {
        self.carrying
    }

    pub fn step_count(&self) -> u32 {
        self.step_count
    }

    pub fn max_steps(&self) -> u32 {
        self.max_steps
    }

    pub fn terminated(&self) -> bool {
        self.terminated
    }

    pub fn truncated(&self) -> bool {
        self.truncated
    }

    pub fn is_done(&self) -> bool {
        self.terminated || self.truncated
    }

    pub fn cell(&self, x: usize, y: usize) -> Cell {
        self.cells[y * self.width + x]
    }

    fn cell_at(&self, x: i64, y: i64) -> Option<Cell> {
        if x < 0 || y < 0 || x >= self.width as i64 || y >= self.height as i64 {
            None
        } else {
            Some(self.cell(x as usize, y as usize))
        }
    }

    fn set(&mut self, (x, y): (usize, usize), cell: Cell) {
        self.cells[y * self.width + x] = cell;
    }

    fn front_pos(&self) -> (usize, usize) {
        let (dx, dy) = self.agent_dir.vec();
        // The border is wall and the agent is never on it, so this stays in bounds.
        (
            (self.agent_pos.0 as i64 + dx) as usize,
            (self.agent_pos.1 as i64 + dy) as usize,
        )
    }

    pub fn step(&mut self, action: Action) -> Result<StepResult> {
        if self.is_done() {
            return Err(Error::Usage("step called on a finished episode".into()));
        }
        self.step_count += 1;
        let mut reward = 0.0;
        let front = self.front_pos();
        let front_cell = self.cell(front.0, front.1);

        match action {
            Action::TurnLeft => self.agent_dir = self.agent_dir.turn_left(),
            Action::TurnRight => self.agent_dir = self.agent_dir.turn_right(),
            Action::Forward => {
                if front_cell.can_overlap() {
                    self.agent_pos = front;
                    match front_cell.kind {
                        CellKind::Goal => {
                            self.terminated = true;
                            reward = self.success_reward();
                        }
                        CellKind::Lava => self.terminated = true,
                        _ => {}
                    }
                }
            }
            Action::Pickup => {
                if front_cell.kind == CellKind::Key && self.carrying.is_none() {
                    self.carrying = Some(front_cell);
                    self.set(front, Cell::EMPTY);
                }
            }
            Action::Drop => {
                if front_cell.kind == CellKind::Empty {
                    if let Some(carried) = self.carrying.take() {
                        self.set(front, carried);
                    }
                }
            }
            Action::Toggle => {
                if front_cell.kind == CellKind::LockedDoor {
                    let has_key = self
                        .carrying
                        .is_some_and(|c| c.kind == CellKind::Key && c.color == front_cell.color);
                    if has_key {
                        self.set(front, Cell::new(CellKind::OpenDoor, front_cell.color));
                    }
                }
            }
            Action::Done => {}
        }

        if !self.terminated && self.step_count >= self.max_steps {
            self.truncated = true;
        }

        Ok(StepResult {
            obs: self.observe(),
            reward,
            terminated: self.terminated,
            truncated: self.truncated,
        })
    }

    fn success_reward(&self) -> f64 {
        1.0 - SUCCESS_PENALTY * (self.step_count as f64 / self.max_steps as f64)
    }

    /// Raw `(object, color, state)` codes of the 7x7 view, indexed `[vx][vy]`.
    pub fn view_codes(&self) -> [[[u8; 3]; VIEW_SIZE]; VIEW_SIZE] {
        let mut codes = [[[0u8; 3]; VIEW_SIZE]; VIEW_SIZE];
        let (fx, fy) = self.agent_dir.vec();
        // Right-hand side of the heading.
        let (rx, ry) = (-fy, fx);
        let (ax, ay) = (self.agent_pos.0 as i64, self.agent_pos.1 as i64);
        let centre = (VIEW_SIZE / 2) as i64;
        for (vx, column) in codes.iter_mut().enumerate() {
            for (vy, code) in column.iter_mut().enumerate() {
                let ahead = (VIEW_SIZE - 1 - vy) as i64;
                let right = vx as i64 - centre;
                let wx = ax + ahead * fx + right * rx;
                let wy = ay + ahead * fy + right * ry;
                *code = if (wx, wy) == (ax, ay) {
                    // The agent's own cell shows what it is holding.
                    self.carrying.unwrap_or(Cell::EMPTY).encode()
                } else {
                    self.cell_at(wx, wy).unwrap_or(Cell::WALL).encode()
                };
            }
        }
        codes
    }

    pub fn observe(&self) -> Observation {
        let codes = self.view_codes();
        let mut values = Vec::with_capacity(OBS_DIM);
        for column in &codes {
            for code in column {
                for (c, &raw) in code.iter().enumerate() {
                    values.push(raw as f64 / CHANNEL_MAX[c]);
                }
            }
        }
        Observation(values)
    }

    /// One character per cell, using the legend accepted by [`parse`](Self::parse).
    pub fn render(&self) -> String {
        let mut out = String::with_capacity((self.width + 1) * self.height);
        for y in 0..self.height {
            for x in 0..self.width {
                let ch = if (x, y) == self.agent_pos {
                    self.agent_dir.glyph()
                } else {
                    match self.cell(x, y).kind {
                        CellKind::Empty => '.',
                        CellKind::Wall => '#',
                        CellKind::LockedDoor => 'D',
                        CellKind::OpenDoor => '/',
                        CellKind::Key => 'K',
                        CellKind::Goal => 'G',
                        CellKind::Lava => 'L',
                    }
                };
                out.push(ch);
            }
            out.push('\n');
        }
        out
    }
}

fn check_size(size: usize) -> Result<()> {
    if size < 5 {
        return Err(Error::Config(format!(
            "grid size must be at least 5, got {size}"
        )));
    }
    if size > 255 {
        return Err(Error::Config(format!(
            "grid size {size} is unreasonably large"
        )));
    }
    Ok(())
}

/// Uniformly picks an empty, agent-free cell in `[x0, x1) x [y0, y1)`.
fn random_empty_cell(
    state: &GridState,
    rng: &mut rng::Rng,
    (x0, x1): (usize, usize),
    (y0, y1): (usize, usize),
    avoid_agent: bool,
) -> (usize, usize) {
    loop {
        let pos = (rng.random_range(x0..x1), rng.random_range(y0..y1));
        if state.cell(pos.0, pos.1).kind != CellKind::Empty {
            continue;
        }
        if avoid_agent && pos == state.agent_pos {
            continue;
        }
        return pos;
    }
}

/// DoorKey: a wall splits the room, the key and agent are on the left, the goal
/// in the bottom-right corner behind a locked door.
pub fn reset_doorkey(seed: u64, size: usize) -> Result<GridState> {
    check_size(size)?;
    let mut rng = rng::seeded(seed);
    let max_steps = 10 * (size * size) as u32;
    let mut state = GridState::walled(size, size, max_steps);
    state.set((size - 2, size - 2), Cell::GOAL);

    let split = rng.random_range(2..size - 2);
    for y in 0..size {
        state.set((split, y), Cell::WALL);
    }

    state.agent_pos = random_empty_cell(&state, &mut rng, (0, split), (0, size), false);
    state.agent_dir = Direction::from_index(rng.random_range(0..4));

    let door_row = rng.random_range(1..size - 2);
    state.set((split, door_row), Cell::locked_door(Color::Yellow));

    let key = random_empty_cell(&state, &mut rng, (0, split), (0, size), true);
    state.set(key, Cell::key(Color::Yellow));
    Ok(state)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum River {
    /// Lava column at the given x.
    Vertical(usize),
    /// Lava row at the given y.
    Horizontal(usize),
}

/// LavaCrossing: lava rivers at even rows/columns between the agent at (1, 1)
/// and the goal, each with a single gap along a monotone route.
pub fn reset_lavacrossing(seed: u64, size: usize, num_crossings: usize) -> Result<GridState> {
    check_size(size)?;
    let mut candidates: Vec<River> = (2..size - 2)
        .step_by(2)
        .map(River::Vertical)
        .chain((2..size - 2).step_by(2).map(River::Horizontal))
        .collect();
    if num_crossings == 0 || num_crossings > candidates.len() {
        return Err(Error::Config(format!(
            "num_crossings must be in 1..={} for size {size}, got {num_crossings}",
            candidates.len()
        )));
    }
    let mut rng = rng::seeded(seed);
    let max_steps = 4 * (size * size) as u32;
    let mut state = GridState::walled(size, size, max_steps);
    state.agent_pos = (1, 1);
    state.agent_dir = Direction::East;
    state.set((size - 2, size - 2), Cell::GOAL);

    shuffle(&mut candidates, &mut rng);
    candidates.truncate(num_crossings);
    let mut cols: Vec<usize> = candidates
        .iter()
        .filter_map(|r| match r {
            River::Vertical(x) => Some(*x),
            River::Horizontal(_) => None,
        })
        .collect();
    let mut rows: Vec<usize> = candidates
        .iter()
        .filter_map(|r| match r {
            River::Horizontal(y) => Some(*y),
            River::Vertical(_) => None,
        })
        .collect();
    cols.sort_unstable();
    rows.sort_unstable();

    for &y in &rows {
        for x in 1..size - 1 {
            state.set((x, y), Cell::LAVA);
        }
    }
    for &x in &cols {
        for y in 1..size - 1 {
            state.set((x, y), Cell::LAVA);
        }
    }

    // The route crosses every river once, in a random interleaving of
    // eastward (through a column) and southward (through a row) moves.
    let mut route: Vec<bool> = std::iter::repeat_n(true, cols.len())
        .chain(std::iter::repeat_n(false, rows.len()))
        .collect();
    shuffle(&mut route, &mut rng);

    let col_limits: Vec<usize> = std::iter::once(0).chain(cols).chain([size - 1]).collect();
    let row_limits: Vec<usize> = std::iter::once(0).chain(rows).chain([size - 1]).collect();
    let (mut room_x, mut room_y) = (0, 0);
    for eastward in route {
        let gap = if eastward {
            let x = col_limits[room_x + 1];
            let y = rng.random_range(row_limits[room_y] + 1..row_limits[room_y + 1]);
            room_x += 1;
            (x, y)
        } else {
            let x = rng.random_range(col_limits[room_x] + 1..col_limits[room_x + 1]);
            let y = row_limits[room_y + 1];
            room_y += 1;
            (x, y)
        };
        state.set(gap, Cell::EMPTY);
    }
    Ok(state)
}

fn shuffle<T>(items: &mut [T], rng: &mut rng::Rng) {
    // Fisher-Yates, written out so the draw sequence is pinned by this crate.
    for i in (1..items.len()).rev() {
        let j = rng.random_range(0..=i);
        items.swap(i, j);
    }
}
