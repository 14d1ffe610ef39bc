//! A complete multi-trial experiment on synthetic data: ρ chosen by 5-fold
//! cross-validation on trial 0, ten trials, and the report written as JSON
//! lines and CSV.

use std::error::Error;

use nrc::bench::{emit_report, read_report, run_experiment_on, ExperimentConfig, ExperimentData, ReportFormat};
use nrc::data_io::{RawDataset, SplitSpec};
use nrc::linalg::DenseMatrix;
use nrc::solvers::CoderKind;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn blobs(seed: u64, classes: usize, per_class: usize, dim: usize) -> Result<RawDataset, Box<dyn Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let centres: Vec<Vec<f64>> = (0..classes)
        .map(|_| (0..dim).map(|_| rng.random_range(0.0..1.0)).collect())
        .collect();
    let mut cols = Vec::new();
    let mut labels = Vec::new();
    for j in 0..classes * per_class {
        let k = j % classes;
        cols.push(centres[k].iter().map(|c| c + 0.4 * rng.random_range(-1.0..1.0)).collect::<Vec<_>>());
        labels.push(k as i64);
    }
    Ok(RawDataset::new(DenseMatrix::from_columns(&cols)?, labels, format!("blobs(seed={seed})"))?)
}

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let data = ExperimentData {
        name: "blobs".into(),
        train: blobs(4, 5, 40, 30)?,
        test: None,
    };
    let split = SplitSpec {
        per_class: 10,
        seed: 2024,
        trials: 10,
    };
    let dir = tempfile::tempdir()?;
    for coder in [CoderKind::Nnls, CoderKind::Ridge] {
        let cfg = ExperimentConfig::new("in-memory", coder, split);
        let report = run_experiment_on(&cfg, &data)?;
        let t0 = &report.trials[0];
        println!(
            "{coder:>5}: rho {} lambda {} -> accuracy {:.2}% ± {:.2}",
            t0.rho,
            t0.lambda,
            100.0 * report.mean_accuracy,
            100.0 * report.stddev_accuracy
        );
        let jsonl = dir.path().join(format!("{coder}.jsonl"));
        emit_report(&report, &jsonl, ReportFormat::JsonLines)?;
        emit_report(&report, dir.path().join(format!("{coder}.csv")), ReportFormat::Csv)?;
        assert_eq!(read_report(&jsonl)?, report);
    }
    let csv = std::fs::read_to_string(dir.path().join("nnls.csv"))?;
    println!("nnls.csv:\n{}", csv.lines().take(3).collect::<Vec<_>>().join("\n"));
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
