//! Shot sampling.
//!
//! All randomness in the crate flows through seeded ChaCha12 generators so
//! that a run is reproducible bit for bit from its seed, on any platform.
//! Sampling walks a cumulative table built in `f64`, which keeps the drawn
//! counts identical across scalar types as well.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::scalar::Real;
use crate::state::Statevector;

/// Histogram of measured bitstrings from a fixed number of shots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShotCounts {
    n: usize,
    total: u64,
    counts: Vec<u64>,
}

impl ShotCounts {
    pub fn n_qubits(&self) -> usize {
        self.n
    }

    /// Total number of shots taken.
    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn count(&self, index: usize) -> u64 {
        self.counts[index]
    }

    /// Observed bitstrings with their counts, in ascending index order.
    pub fn iter_nonzero(&self) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.counts.iter().enumerate().filter(|(_, &c)| c > 0).map(|(i, &c)| (i, c))
    }

    /// Sorted list of observed bitstring indices.
    pub fn support(&self) -> Vec<usize> {
        self.iter_nonzero().map(|(i, _)| i).collect()
    }

    /// Reconstructed probabilities `count/total`.
    pub fn frequencies<T: Real>(&self) -> Vec<T> {
        let total = T::of(self.total as f64);
        self.counts.iter().map(|&c| T::of(c as f64) / total).collect()
    }
}

/// Draw `shots` measurements of `state` in the computational basis.
pub fn sample_counts<T: Real>(state: &Statevector<T>, shots: u64, seed: u64) -> ShotCounts {
    let mut sampler = BitstringSampler::from_state(state, seed);
    let mut counts = vec![0u64; state.dim()];
    for _ in 0..shots {
        counts[sampler.draw()] += 1;
    }
    ShotCounts { n: state.n_qubits(), total: shots, counts }
}

/// Incremental sampler over a fixed distribution; one basis index per draw.
pub struct BitstringSampler {
    cdf: Vec<f64>,
    rng: ChaCha12Rng,
}

impl BitstringSampler {
    pub fn from_state<T: Real>(state: &Statevector<T>, seed: u64) -> Self {
        let mut cdf = Vec::with_capacity(state.dim());
        let mut acc = 0.0f64;
        for p in state.probabilities() {
            acc += p.to_f64_lossy();
            cdf.push(acc);
        }
        Self { cdf, rng: ChaCha12Rng::seed_from_u64(seed) }
    }

    pub fn draw(&mut self) -> usize {
        let u: f64 = self.rng.gen::<f64>() * self.cdf.last().copied().unwrap_or(1.0);
        let i = self.cdf.partition_point(|&c| c <= u);
        i.min(self.cdf.len() - 1)
    }
}

/// Deterministic per-stage seed derived from the master run seed.
///
/// Stages are named (`"ansatz"`, `"circuit"`, ..) and indexed, so adding a
/// stage or reordering work never shifts the seeds of the others.
pub fn stage_seed(master: u64, stage: &str, index: u64) -> u64 {
    let mut tag = 0xcbf2_9ce4_8422_2325u64;
    for b in stage.bytes() {
        tag = (tag ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3);
    }
    mix(mix(master).wrapping_add(tag).wrapping_add(mix(index)))
}

fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
