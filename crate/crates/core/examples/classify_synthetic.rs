//! NRC next to its ridge (CRC) and lasso (SRC) counterparts on a small
//! synthetic problem: three classes with orthogonal means in R^20.
//!
//! Besides accuracy, it prints how much coefficient mass each coder puts on
//! the query's own class. The non-negative code concentrates there; ridge
//! spreads signed weight over every class.

use std::error::Error;

use nrc::classifier::{fit, LabeledDataset};
use nrc::linalg::DenseMatrix;
use nrc::solvers::{CoderKind, SolverConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

const K: usize = 3;
const DIM: usize = 20;

fn sample(rng: &mut ChaCha8Rng, class: usize, sigma: f64) -> Vec<f64> {
    let noise = Normal::new(0.0, sigma).unwrap();
    (0..DIM)
        .map(|i| if i == class { 1.0 } else { 0.0 } + noise.sample(rng))
        .collect()
}

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (per_class, sigma) = (3, 0.05);
    let mut cols = Vec::new();
    let mut labels = Vec::new();
    for k in 0..K {
        for _ in 0..per_class {
            cols.push(sample(&mut rng, k, sigma));
            labels.push(k as i64);
        }
    }
    let train = LabeledDataset::from_raw_labels(DenseMatrix::from_columns(&cols)?, &labels)?;
    let queries: Vec<(usize, Vec<f64>)> = (0..300).map(|q| (q % K, sample(&mut rng, q % K, sigma))).collect();

    for (coder, cfg) in [
        (CoderKind::Nnls, SolverConfig::default()),
        (CoderKind::Ridge, SolverConfig::default().with_lambda(0.01)),
        (CoderKind::Lasso, SolverConfig::default().with_lambda(0.01)),
    ] {
        let clf = fit(&train, coder, cfg)?;
        let mut correct = 0;
        let mut purity = 0.0;
        for (label, y) in &queries {
            let p = clf.predict(y)?;
            correct += (p.label == *label) as usize;
            let own: f64 = clf.class_index()[*label].iter().map(|&j| p.coefficients[j].abs()).sum();
            let all: f64 = p.coefficients.iter().map(|c| c.abs()).sum();
            purity += own / all;
        }
        println!(
            "{coder:>5}: accuracy {:.3}, mean own-class coefficient mass {:.3}",
            correct as f64 / queries.len() as f64,
            purity / queries.len() as f64
        );
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
