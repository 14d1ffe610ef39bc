//! Per-query classification time for ridge, NNLS with T = 5 and NNLS with
//! T = 50 on a 500-dimensional, 3000-atom dictionary. Factorizations are
//! built at fit time, so only the per-query work is measured.

use std::error::Error;

use nrc::bench::time_query;
use nrc::classifier::{fit, LabeledDataset};
use nrc::linalg::DenseMatrix;
use nrc::solvers::{CoderKind, SolverConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    run_with(500, 3000, 20)
}

pub fn run_with(dim: usize, atoms: usize, queries: usize) -> Result<(), Box<dyn Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let x = DenseMatrix::new(dim, atoms, (0..dim * atoms).map(|_| rng.random_range(0.0..1.0)).collect())?;
    let labels: Vec<i64> = (0..atoms).map(|j| (j % 10) as i64).collect();
    let train = LabeledDataset::from_raw_labels(x, &labels)?;
    let q = DenseMatrix::new(dim, queries, (0..dim * queries).map(|_| rng.random_range(0.0..1.0)).collect())?;

    for (name, coder, cfg) in [
        ("ridge", CoderKind::Ridge, SolverConfig::default().with_lambda(0.01)),
        ("nnls T=5", CoderKind::Nnls, SolverConfig::default()),
        ("nnls T=50", CoderKind::Nnls, SolverConfig::default().with_max_iters(50)),
    ] {
        let clf = fit(&train, coder, cfg)?;
        let t = time_query(&clf, &q)?;
        println!(
            "{name:>10}: mean {:.3} ms, median {:.3} ms over {} queries",
            1e3 * t.mean_seconds,
            1e3 * t.median_seconds,
            t.queries
        );
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
