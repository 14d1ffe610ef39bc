mod common;

use common::gaussian;
use nrc::bench::time_query;
use nrc::classifier::{fit, LabeledDataset};
use nrc::solvers::{CoderKind, SolverConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Median per-query seconds, the smallest over three repetitions.
fn median_seconds(train: &LabeledDataset, queries: &nrc::linalg::DenseMatrix, coder: CoderKind, t: usize) -> f64 {
    // tolerance 0 would be rejected; this one is never met, so exactly t iterations run
    let cfg = SolverConfig::default().with_max_iters(t).with_tol(1e-300).with_lambda(0.01);
    let clf = fit(train, coder, cfg).unwrap();
    (0..3)
        .map(|_| time_query(&clf, queries).unwrap().median_seconds)
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn nnls_time_grows_linearly_with_iterations() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let (dim, atoms) = (120, 800);
    let labels: Vec<i64> = (0..atoms).map(|j| (j % 10) as i64).collect();
    let train = LabeledDataset::from_raw_labels(gaussian(&mut rng, dim, atoms), &labels).unwrap();
    let queries = gaussian(&mut rng, dim, 9);
    let t20 = median_seconds(&train, &queries, CoderKind::Nnls, 20);
    let t40 = median_seconds(&train, &queries, CoderKind::Nnls, 40);
    let ratio = t40 / t20;
    assert!((1.0..=3.0).contains(&ratio), "T=20 {t20:.3e}s, T=40 {t40:.3e}s, ratio {ratio:.2}");
    let ridge = median_seconds(&train, &queries, CoderKind::Ridge, 1);
    assert!(ridge < t20, "ridge {ridge:.3e}s, nnls {t20:.3e}s");
}

#[test]
fn timing_needs_a_query() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let train = LabeledDataset::from_raw_labels(gaussian(&mut rng, 4, 4), &[0, 1, 0, 1]).unwrap();
    let clf = fit(&train, CoderKind::Ridge, SolverConfig::default()).unwrap();
    assert!(time_query(&clf, &nrc::linalg::DenseMatrix::zeros(4, 0)).is_err());
    let s = time_query(&clf, &gaussian(&mut rng, 4, 3)).unwrap();
    assert_eq!(s.queries, 3);
    assert!(s.mean_seconds > 0.0 && s.median_seconds > 0.0);
}
