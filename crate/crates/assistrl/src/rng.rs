//! Deterministic random streams.
//!
//! Every source of randomness in an experiment is an [`RngStream`] identified
//! by `(seed, stream_id)`. Identical identifiers replay identical sample
//! sequences regardless of platform, thread scheduling, or evaluation order.
//! Run-level streams are derived from `(master_seed, run, purpose)` so that
//! adding or removing one consumer never perturbs another.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// What a run-level stream feeds. One stream per `(run, purpose)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StreamPurpose {
    /// Initial-state draws at episode reset.
    InitState,
    /// Environment transition noise.
    DynamicsNoise,
    /// Stochastic policy sampling.
    PolicySample,
    /// Network weight initialization.
    WeightInit,
    /// Minibatch shuffling inside gradient updates.
    UpdateShuffle,
}

impl StreamPurpose {
    fn tag(self) -> u64 {
        match self {
            StreamPurpose::InitState => 1,
            StreamPurpose::DynamicsNoise => 2,
            StreamPurpose::PolicySample => 3,
            StreamPurpose::WeightInit => 4,
            StreamPurpose::UpdateShuffle => 5,
        }
    }
}

/// A counter-based random stream. Cheap to construct, deterministic to replay.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        RngStream {
            seed,
            stream_id,
            rng,
        }
    }

    /// Stream for one `(run, purpose)` pair under a master seed.
    pub fn for_run(master_seed: u64, run: u64, purpose: StreamPurpose) -> Self {
        let stream_id = splitmix64(splitmix64(run).wrapping_add(purpose.tag()));
        Self::new(master_seed, stream_id)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// One standard-normal draw.
    pub fn standard_normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    /// `n` iid standard-normal draws.
    pub fn standard_normal_vec(&mut self, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.standard_normal()).collect()
    }

    /// Uniform draw in `[lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.random_range(lo..hi)
    }

    /// Fair coin; `true` half the time.
    pub fn coin(&mut self) -> bool {
        self.rng.random()
    }

    pub fn shuffle<T>(&mut self, slice: &mut [T]) {
        slice.shuffle(&mut self.rng);
    }
}
