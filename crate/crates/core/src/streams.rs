//! Deterministic random streams.
//!
//! Every trial gets its own seed derived from `(master, tag, trial)` and every
//! node inside a trial draws from its own ChaCha stream, so results do not
//! depend on the worker count or on which nodes are simulated together.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub type Stream = ChaCha8Rng;

pub const DEFAULT_SEED: u64 = 0x5EED_CAFE;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xCBF2_9CE4_8422_2325;
    for b in bytes {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    h
}

/// A named seed: the master seed plus a tag identifying the experiment.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StreamSeed {
    key: u64,
}

impl StreamSeed {
    pub fn new(master: u64) -> Self {
        Self { key: splitmix64(master) }
    }

    /// Child seed for a sub-experiment; distinct tags give unrelated streams.
    pub fn derive(self, tag: &str) -> Self {
        Self { key: splitmix64(self.key ^ fnv1a(tag.as_bytes())) }
    }

    pub fn derive_index(self, index: u64) -> Self {
        Self { key: splitmix64(self.key ^ splitmix64(index.wrapping_add(0xA5A5_A5A5))) }
    }

    pub fn trial(self, index: u64) -> TrialStreams {
        TrialStreams { seed: splitmix64(self.key.wrapping_add(splitmix64(index))) }
    }

    /// A single stream, for batch-level Monte Carlo where nodes are not tracked.
    pub fn stream(self, index: u64) -> Stream {
        self.trial(index).node(0)
    }
}

/// Streams for one trial, one per node.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TrialStreams {
    seed: u64,
}

impl TrialStreams {
    pub fn node(&self, node: u64) -> Stream {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(node);
        rng
    }
}

const BATCH: u64 = 8192;

/// Runs `count` Bernoulli trials in fixed-size batches, one stream per batch,
/// and returns the number of successes. Independent of the thread count.
pub fn parallel_count<F>(seed: StreamSeed, count: u64, f: F) -> u64
where
    F: Fn(&mut Stream) -> bool + Sync,
{
    let batches = count.div_ceil(BATCH);
    (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = seed.stream(b);
            let len = BATCH.min(count - b * BATCH);
            (0..len).filter(|_| f(&mut rng)).count() as u64
        })
        .sum()
}

/// Maps every trial index through `f` in parallel, preserving index order.
pub fn parallel_trials<T, F>(seed: StreamSeed, count: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(TrialStreams) -> T + Sync,
{
    (0..count).into_par_iter().map(|i| f(seed.trial(i))).collect()
}
