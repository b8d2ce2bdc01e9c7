//! Projective sampling in the computational basis.

use std::collections::BTreeMap;

use rand::Rng;

use crate::parallel;
use crate::rng;
use crate::sim::state::StateVector;

/// Shots drawn per seeded substream; fixed so the outcome stream is
/// independent of thread scheduling.
const SHOT_CHUNK: u64 = 8192;

/// Measurement record: shot count and a bitstring histogram.
#[derive(Clone, Debug)]
pub struct SampleSet {
    shots: u64,
    n_qubits: usize,
    counts: BTreeMap<u64, u64>,
    seed: u64,
}

impl SampleSet {
    pub fn shots(&self) -> u64 {
        self.shots
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Seed actually used (entropy-derived seeds are resolved and recorded).
    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Counts keyed by the integer value of the bitstring.
    pub fn counts(&self) -> &BTreeMap<u64, u64> {
        &self.counts
    }

    /// Counts keyed by the bitstring label (qubit 0 leftmost).
    pub fn bitstring_counts(&self) -> BTreeMap<String, u64> {
        self.counts
            .iter()
            .map(|(&k, &v)| (format!("{:0width$b}", k, width = self.n_qubits), v))
            .collect()
    }

    pub fn frequency(&self, outcome: u64) -> f64 {
        *self.counts.get(&outcome).unwrap_or(&0) as f64 / self.shots as f64
    }

    /// Empirical distribution over all `2^n` outcomes.
    pub fn frequencies(&self) -> Vec<f64> {
        let mut freq = vec![0.0; 1 << self.n_qubits];
        for (&k, &v) in &self.counts {
            freq[k as usize] = v as f64 / self.shots as f64;
        }
        freq
    }

    /// Total-variation distance to an exact distribution.
    pub fn tv_distance(&self, probabilities: &[f64]) -> f64 {
        let freq = self.frequencies();
        0.5 * freq
            .iter()
            .zip(probabilities.iter())
            .map(|(f, p)| (f - p).abs())
            .sum::<f64>()
    }
}

/// Draw `shots` bitstrings i.i.d. from `|amplitudes|^2`.
///
/// One pass builds the cumulative distribution, then each shot is a binary
/// search: `O(2^N + shots * N)`. Shot chunks use independent seeded
/// substreams and are merged in chunk order, so the result depends only on
/// `(state, shots, seed)`.
pub fn sample(state: &StateVector, shots: u64, seed: u64) -> SampleSet {
    assert!(shots >= 1, "need at least one shot");
    let seed = rng::resolve_seed(seed);
    let mut cdf = Vec::with_capacity(state.dim());
    let mut acc = 0.0;
    for a in state.amplitudes() {
        acc += a.norm_sqr();
        cdf.push(acc);
    }
    let last = cdf.len() - 1;
    cdf[last] = f64::max(cdf[last], 1.0);

    let n_chunks = shots.div_ceil(SHOT_CHUNK);
    let chunk_counts: Vec<BTreeMap<u64, u64>> = parallel::map_indexed(n_chunks as usize, |c| {
        let lo = c as u64 * SHOT_CHUNK;
        let hi = (lo + SHOT_CHUNK).min(shots);
        let mut gen = rng::substream(seed, c as u64);
        let mut counts = BTreeMap::new();
        for _ in lo..hi {
            let u: f64 = gen.random();
            let idx = cdf.partition_point(|&p| p <= u).min(last);
            *counts.entry(idx as u64).or_insert(0) += 1;
        }
        counts
    });

    let mut counts = BTreeMap::new();
    for chunk in chunk_counts {
        for (k, v) in chunk {
            *counts.entry(k).or_insert(0) += v;
        }
    }
    SampleSet {
        shots,
        n_qubits: state.n_qubits(),
        counts,
        seed,
    }
}
