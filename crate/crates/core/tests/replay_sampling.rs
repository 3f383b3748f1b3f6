use disrc_core::rng::seeded;
use disrc_core::{Action, ReplayBuffer, Transition};
use proptest::prelude::*;

fn transition(tag: f64) -> Transition {
    Transition {
        obs: vec![tag],
        action: Action::Forward,
        reward: tag,
        next_obs: vec![tag],
        done: false,
        deviation: 0.0,
    }
}

#[test]
fn sampling_is_uniform() {
    let n = 200;
    let mut buffer = ReplayBuffer::new(n);
    for i in 0..n {
        buffer.push(transition(i as f64));
    }
    let mut rng = seeded(31);
    let mut counts = vec![0usize; n];
    let draws = 2_000;
    for _ in 0..draws {
        for i in buffer.sample_indices(128, &mut rng).unwrap() {
            counts[i] += 1;
        }
    }
    let total = (draws * 128) as f64;
    let p = 1.0 / n as f64;
    let expected = total * p;
    let sd = (total * p * (1.0 - p)).sqrt();
    for (i, &c) in counts.iter().enumerate() {
        assert!(
            (c as f64 - expected).abs() < 4.0 * sd,
            "slot {i}: {c} draws, expected {expected} +- {sd}"
        );
    }
}

proptest! {
    #[test]
    fn ring_keeps_newest(capacity in 1usize..64, pushes in 0usize..200) {
        let mut buffer = ReplayBuffer::new(capacity);
        for i in 0..pushes {
            buffer.push(transition(i as f64));
        }
        prop_assert_eq!(buffer.len(), pushes.min(capacity));
        let kept: Vec<f64> = buffer.iter().map(|t| t.reward).collect();
        let expected: Vec<f64> = (pushes.saturating_sub(capacity)..pushes).map(|i| i as f64).collect();
        prop_assert_eq!(kept, expected);
    }

    #[test]
    fn samples_only_stored_items(capacity in 1usize..64, pushes in 1usize..200, batch in 1usize..32, seed in any::<u64>()) {
        let mut buffer = ReplayBuffer::new(capacity);
        for i in 0..pushes {
            buffer.push(transition(i as f64));
        }
        let mut rng = seeded(seed);
        match buffer.sample(batch, &mut rng) {
            Some(s) => {
                prop_assert!(buffer.len() >= batch);
                prop_assert_eq!(s.len(), batch);
                let lo = pushes.saturating_sub(capacity) as f64;
                prop_assert!(s.iter().all(|t| t.reward >= lo && t.reward < pushes as f64));
            }
            None => prop_assert!(buffer.len() < batch),
        }
    }
}
