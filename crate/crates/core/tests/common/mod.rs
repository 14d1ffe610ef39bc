#![allow(dead_code)]

use nrc::classifier::{FittedClassifier, LabeledDataset, Prediction};
use nrc::linalg::DenseMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

pub fn gaussian(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DenseMatrix {
    DenseMatrix::new(rows, cols, (0..rows * cols).map(|_| rng.sample(StandardNormal)).collect()).unwrap()
}

pub fn gaussian_vec(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.sample(StandardNormal)).collect()
}

/// Well-separated fixture: class k's mean is the unit vector e_k in R^20,
/// within-class noise N(0, 0.05²), three training samples per class.
pub struct PurityFixture {
    pub train: LabeledDataset,
    pub queries: Vec<(usize, Vec<f64>)>,
}

pub const PURITY_CLASSES: usize = 3;
pub const PURITY_DIM: usize = 20;

fn purity_sample(rng: &mut ChaCha8Rng, class: usize) -> Vec<f64> {
    let noise = Normal::new(0.0, 0.05).unwrap();
    (0..PURITY_DIM)
        .map(|i| if i == class { 1.0 } else { 0.0 } + noise.sample(rng))
        .collect()
}

pub fn purity_fixture(rng: &mut ChaCha8Rng, queries: usize) -> PurityFixture {
    let mut cols = Vec::new();
    let mut labels = Vec::new();
    for k in 0..PURITY_CLASSES {
        for _ in 0..3 {
            cols.push(purity_sample(rng, k));
            labels.push(k as i64);
        }
    }
    let train = LabeledDataset::from_raw_labels(DenseMatrix::from_columns(&cols).unwrap(), &labels).unwrap();
    let queries = (0..queries)
        .map(|_| {
            let k = rng.random_range(0..PURITY_CLASSES);
            (k, purity_sample(rng, k))
        })
        .collect();
    PurityFixture { train, queries }
}

/// Fraction of absolute coefficient mass placed on `class`'s atoms.
pub fn own_class_mass(clf: &FittedClassifier, p: &Prediction, class: usize) -> f64 {
    let own: f64 = clf.class_index()[class].iter().map(|&j| p.coefficients[j].abs()).sum();
    let all: f64 = p.coefficients.iter().map(|c| c.abs()).sum();
    if all == 0.0 {
        0.0
    } else {
        own / all
    }
}

/// Columns scaled to unit ℓ2 norm, computed independently of the library.
pub fn unit_columns(x: &DenseMatrix) -> DenseMatrix {
    let cols: Vec<Vec<f64>> = x
        .columns()
        .map(|c| {
            let n = c.iter().map(|v| v * v).sum::<f64>().sqrt();
            c.iter().map(|v| v / n).collect()
        })
        .collect();
    DenseMatrix::from_columns(&cols).unwrap()
}
