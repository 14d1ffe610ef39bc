//! Training-only PCA followed by the classifier, saved to disk and reloaded.
//! Columns are ℓ2-normalised after projection.

use std::error::Error;

use nrc::bench::ModelBundle;
use nrc::classifier::LabeledDataset;
use nrc::linalg::DenseMatrix;
use nrc::solvers::{CoderKind, SolverConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (dim, classes, per_class) = (64, 4, 15);
    // each class lives near its own random prototype
    let protos: Vec<Vec<f64>> = (0..classes)
        .map(|_| (0..dim).map(|_| rng.random_range(0.0..1.0)).collect())
        .collect();
    let draw = |k: usize, rng: &mut ChaCha8Rng| -> Vec<f64> {
        protos[k].iter().map(|p| p + 0.15 * rng.random_range(-1.0..1.0)).collect()
    };
    let (mut cols, mut labels) = (Vec::new(), Vec::new());
    for k in 0..classes {
        for _ in 0..per_class {
            cols.push(draw(k, &mut rng));
            labels.push(k as i64 * 10);
        }
    }
    let train = LabeledDataset::from_raw_labels(DenseMatrix::from_columns(&cols)?, &labels)?;
    let model = ModelBundle::fit(&train, CoderKind::Nnls, SolverConfig::default().with_rho(0.1), Some(12))?;
    let pca = model.pca().expect("fitted with PCA");
    println!(
        "PCA {} -> {}, leading variances {:.4?}",
        pca.input_dim(),
        pca.output_dim(),
        &pca.explained_variance()[..3]
    );

    let test_cols: Vec<Vec<f64>> = (0..40).map(|q| draw(q % classes, &mut rng)).collect();
    let test = DenseMatrix::from_columns(&test_cols)?;
    let predicted = model.predict_labels(&test)?;
    let correct = predicted.iter().enumerate().filter(|(q, &p)| p == (q % classes) as i64 * 10).count();
    println!("accuracy {correct}/40");

    let dir = tempfile::tempdir()?;
    let path = dir.path().join("model.nrc");
    model.save(&path)?;
    let reloaded = ModelBundle::load(&path)?;
    assert_eq!(reloaded.predict_labels(&test)?, predicted);
    println!("saved {} bytes, reloaded model agrees", std::fs::metadata(&path)?.len());
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
