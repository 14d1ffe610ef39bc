//! Five-fold stratified cross-validation of the ADMM penalty ρ for the NNLS
//! coder and of λ for the ridge coder, on one training draw.

use std::error::Error;

use nrc::bench::{cross_validate, ExperimentConfig};
use nrc::classifier::LabeledDataset;
use nrc::data_io::SplitSpec;
use nrc::linalg::DenseMatrix;
use nrc::solvers::CoderKind;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let (classes, per_class, dim) = (4, 20, 16);
    let centres: Vec<Vec<f64>> = (0..classes)
        .map(|_| (0..dim).map(|_| rng.random_range(0.0..1.0)).collect())
        .collect();
    let mut cols = Vec::new();
    let mut labels = Vec::new();
    for j in 0..classes * per_class {
        let k = j % classes;
        cols.push(centres[k].iter().map(|c| c + 0.5 * rng.random_range(-1.0..1.0)).collect::<Vec<_>>());
        labels.push(k as i64);
    }
    let train = LabeledDataset::from_raw_labels(DenseMatrix::from_columns(&cols)?, &labels)?;
    let split = SplitSpec {
        per_class,
        seed: 7,
        trials: 1,
    };
    for coder in [CoderKind::Nnls, CoderKind::Ridge] {
        let cfg = ExperimentConfig::new("in-memory", coder, split);
        let out = cross_validate(&train, &cfg, 0)?;
        println!("{coder} ({}):", cfg.tuned().name());
        for s in &out.scores {
            println!("  {:>8} -> {:.3}", s.value, s.accuracy);
        }
        println!("  chosen {}", out.value);
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
