//! Seeded stratified sampling.
//!
//! Randomness comes from ChaCha8 (a counter-based stream cipher), keyed with
//! the little-endian seed in bytes 0..8 and a purpose tag in bytes 8..16,
//! with the trial index as the stream id. Bounded integers are drawn by
//! rejection from `next_u64`, so the sequence depends only on ChaCha8 itself
//! and not on any sampling helper whose algorithm might change.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::RawDataset;
use crate::classifier::LabeledDataset;
use crate::error::{Error, Result};

/// How a training set is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitSpec {
    /// Training samples drawn from every class.
    pub per_class: usize,
    pub seed: u64,
    pub trials: usize,
}

impl SplitSpec {
    pub fn validate(&self) -> Result<()> {
        if self.per_class == 0 {
            return Err(Error::InvalidConfig("per_class must be >= 1".into()));
        }
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be >= 1".into()));
        }
        Ok(())
    }
}

/// What a random stream is used for; separates the sampling and CV streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamPurpose {
    TrainSplit = 1,
    CrossValidation = 2,
    Shuffle = 3,
}

/// Deterministic uniform integer source.
pub struct SampleStream {
    rng: ChaCha8Rng,
}

impl SampleStream {
    pub fn new(seed: u64, purpose: StreamPurpose, trial: u64) -> Self {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&seed.to_le_bytes());
        key[8..16].copy_from_slice(&(purpose as u64).to_le_bytes());
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(trial);
        SampleStream { rng }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform in `0..n`; `n` must be positive.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "empty range");
        // values under this threshold would bias the modulo
        let threshold = n.wrapping_neg() % n;
        loop {
            let r = self.rng.next_u64();
            if r >= threshold {
                return r % n;
            }
        }
    }

    /// Moves a uniform random `k`-subset of `items` to the front (partial
    /// Fisher-Yates).
    pub fn partial_shuffle<T>(&mut self, items: &mut [T], k: usize) {
        let len = items.len();
        for i in 0..k.min(len) {
            let j = i + self.below((len - i) as u64) as usize;
            items.swap(i, j);
        }
    }
}

/// Draws `per_class` samples from every class without replacement.
///
/// Classes are visited in ascending label order and share one stream seeded
/// by `(spec.seed, trial)`. Both outputs keep the input order of their
/// samples and together partition the input.
pub fn stratified_sample(
    data: &RawDataset,
    spec: &SplitSpec,
    trial: usize,
) -> Result<(LabeledDataset, LabeledDataset)> {
    spec.validate()?;
    let all = data.to_labeled()?;
    let (train, rest) = stratified_indices(&all, spec.per_class, spec.seed, trial)?;
    Ok((all.subset(&train), all.subset(&rest)))
}

/// Index form of [`stratified_sample`] on an already-labelled dataset.
pub fn stratified_indices(
    data: &LabeledDataset,
    per_class: usize,
    seed: u64,
    trial: usize,
) -> Result<(Vec<usize>, Vec<usize>)> {
    let mut stream = SampleStream::new(seed, StreamPurpose::TrainSplit, trial as u64);
    let mut chosen = vec![false; data.len()];
    for (class, members) in data.class_index().iter().enumerate() {
        if members.len() < per_class {
            return Err(Error::ClassTooSmall {
                class: data.class_values()[class],
                available: members.len(),
                required: per_class,
            });
        }
        let mut pool = members.clone();
        stream.partial_shuffle(&mut pool, per_class);
        for &j in &pool[..per_class] {
            chosen[j] = true;
        }
    }
    let train = (0..data.len()).filter(|&j| chosen[j]).collect();
    let rest = (0..data.len()).filter(|&j| !chosen[j]).collect();
    Ok((train, rest))
}

/// Stratified k-fold assignment: within each class the members are shuffled
/// and dealt round-robin, so every fold gets `⌊n_k/k⌋` or `⌈n_k/k⌉` of them.
pub fn stratified_folds(data: &LabeledDataset, folds: usize, seed: u64, trial: usize) -> Result<Vec<usize>> {
    if folds < 2 {
        return Err(Error::InvalidConfig("cross-validation needs at least 2 folds".into()));
    }
    let mut stream = SampleStream::new(seed, StreamPurpose::CrossValidation, trial as u64);
    let mut assignment = vec![0; data.len()];
    for (class, members) in data.class_index().iter().enumerate() {
        if members.len() < folds {
            return Err(Error::ClassTooSmall {
                class: data.class_values()[class],
                available: members.len(),
                required: folds,
            });
        }
        let mut pool = members.clone();
        stream.partial_shuffle(&mut pool, members.len());
        for (pos, &j) in pool.iter().enumerate() {
            assignment[j] = pos % folds;
        }
    }
    Ok(assignment)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::DenseMatrix;

    fn dataset(per_class: usize, classes: usize) -> RawDataset {
        let n = per_class * classes;
        let x = DenseMatrix::new(1, n, (0..n).map(|j| j as f64).collect()).unwrap();
        let labels = (0..n).map(|j| (j % classes) as i64).collect();
        RawDataset::new(x, labels, "synthetic".into()).unwrap()
    }

    #[test]
    fn split_sizes_and_partition() {
        let raw = dataset(10, 3);
        let spec = SplitSpec {
            per_class: 3,
            seed: 7,
            trials: 1,
        };
        let (train, rest) = stratified_sample(&raw, &spec, 0).unwrap();
        for k in 0..3 {
            assert_eq!(train.class_index()[k].len(), 3);
            assert_eq!(rest.class_index()[k].len(), 7);
        }
        let mut ids: Vec<f64> = train
            .features()
            .as_slice()
            .iter()
            .chain(rest.features().as_slice())
            .copied()
            .collect();
        ids.sort_by(f64::total_cmp);
        assert_eq!(ids, (0..30).map(|j| j as f64).collect::<Vec<_>>());
        // order preserved
        assert!(rest.features().as_slice().windows(2).all(|w| w[0] < w[1]));
        assert!(train.features().as_slice().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn whole_class_leaves_empty_remainder() {
        let raw = dataset(4, 2);
        let spec = SplitSpec {
            per_class: 4,
            seed: 1,
            trials: 1,
        };
        let (train, rest) = stratified_sample(&raw, &spec, 0).unwrap();
        assert_eq!(train.len(), 8);
        assert!(rest.is_empty());
        let too_many = SplitSpec { per_class: 5, ..spec };
        assert!(matches!(
            stratified_sample(&raw, &too_many, 0),
            Err(Error::ClassTooSmall { available: 4, required: 5, .. })
        ));
    }

    #[test]
    fn deterministic_per_seed_and_trial() {
        let raw = dataset(20, 4);
        let spec = SplitSpec {
            per_class: 5,
            seed: 42,
            trials: 3,
        };
        let a = stratified_sample(&raw, &spec, 1).unwrap();
        let b = stratified_sample(&raw, &spec, 1).unwrap();
        assert_eq!(a, b);
        let c = stratified_sample(&raw, &spec, 2).unwrap();
        assert_ne!(a.0, c.0);
    }

    #[test]
    fn pinned_stream_vectors() {
        // Regression pins for cross-platform determinism of the sampling stream.
        let mut s = SampleStream::new(42, StreamPurpose::TrainSplit, 0);
        let draws: Vec<u64> = (0..5).map(|_| s.below(1000)).collect();
        assert_eq!(draws, PINNED_DRAWS);
        let raw = dataset(10, 2);
        let all = raw.to_labeled().unwrap();
        let (train, _) = stratified_indices(&all, 3, 42, 0).unwrap();
        assert_eq!(train, PINNED_TRAIN);
    }

    const PINNED_DRAWS: [u64; 5] = [97, 252, 391, 982, 501];
    const PINNED_TRAIN: [usize; 6] = [2, 3, 5, 11, 14, 18];

    #[test]
    fn below_is_in_range_and_roughly_uniform() {
        let mut s = SampleStream::new(3, StreamPurpose::Shuffle, 0);
        let mut counts = [0usize; 7];
        for _ in 0..70_000 {
            counts[s.below(7) as usize] += 1;
        }
        for c in counts {
            assert!((9_400..10_600).contains(&c), "{counts:?}");
        }
    }

    #[test]
    fn folds_are_stratified() {
        let raw = dataset(11, 3);
        let all = raw.to_labeled().unwrap();
        let f = stratified_folds(&all, 5, 9, 0).unwrap();
        for members in all.class_index() {
            let mut per_fold = [0; 5];
            for &j in members {
                per_fold[f[j]] += 1;
            }
            assert!(per_fold.iter().all(|&c| c == 2 || c == 3), "{per_fold:?}");
        }
        assert!(stratified_folds(&all, 12, 9, 0).is_err());
        assert!(stratified_folds(&all, 1, 9, 0).is_err());
    }
}
