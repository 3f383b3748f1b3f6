//! Fixed-capacity experience replay with uniform sampling.

use rand::Rng as _;

use crate::gridworld::Action;
use crate::nn::Matrix;
use crate::rng::Rng;

pub const DEFAULT_CAPACITY: usize = 50_000;

#[derive(Clone, Debug, PartialEq)]
pub struct Transition {
    pub obs: Vec<f64>,
    pub action: Action,
    /// Reward used in the TD target: raw for the baseline, shaped for DISRC.
    pub reward: f64,
    pub next_obs: Vec<f64>,
    /// Terminal (goal or lava) only; time-limit truncation keeps bootstrapping.
    pub done: bool,
    /// Latent surprise of `next_obs` at collection time (0 when unused).
    pub deviation: f64,
}

#[derive(Clone, Debug)]
pub struct ReplayBuffer {
    capacity: usize,
    storage: Vec<Transition>,
    write_index: usize,
}

impl ReplayBuffer {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "replay capacity must be positive");
        ReplayBuffer {
            capacity,
            storage: Vec::new(),
            write_index: 0,
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.storage.len()
    }

    pub fn is_empty(&self) -> bool {
        self.storage.is_empty()
    }

    /// Appends, evicting the oldest entry once full.
    pub fn push(&mut self, t: Transition) {
        if self.storage.len() < self.capacity {
            self.storage.push(t);
        } else {
            self.storage[self.write_index] = t;
        }
        self.write_index = (self.write_index + 1) % self.capacity;
    }

    /// Entries from oldest to newest.
    pub fn iter(&self) -> impl Iterator<Item = &Transition> {
        let split = if self.storage.len() < self.capacity {
            0
        } else {
            self.write_index
        };
        self.storage[split..].iter().chain(&self.storage[..split])
    }

    /// `batch_size` storage slots drawn uniformly with replacement, or `None`
    /// while the buffer holds fewer than `batch_size` entries.
    pub fn sample_indices(&self, batch_size: usize, rng: &mut Rng) -> Option<Vec<usize>> {
        if batch_size == 0 || self.storage.len() < batch_size {
            return None;
        }
        let live = self.storage.len();
        Some((0..batch_size).map(|_| rng.random_range(0..live)).collect())
    }

    pub fn sample(&self, batch_size: usize, rng: &mut Rng) -> Option<Vec<&Transition>> {
        self.sample_indices(batch_size, rng)
            .map(|idx| idx.into_iter().map(|i| &self.storage[i]).collect())
    }
}

/// Observations and next observations of a batch as row matrices.
pub(crate) fn batch_matrices(batch: &[&Transition]) -> (Matrix, Matrix) {
    let dim = batch.first().map_or(0, |t| t.obs.len());
    let mut obs = Vec::with_capacity(batch.len() * dim);
    let mut next = Vec::with_capacity(batch.len() * dim);
    for t in batch {
        obs.extend_from_slice(&t.obs);
        next.extend_from_slice(&t.next_obs);
    }
    (
        Matrix::from_vec(batch.len(), dim, obs).expect("uniform observation width"),
        Matrix::from_vec(batch.len(), dim, next).expect("uniform observation width"),
    )
}
