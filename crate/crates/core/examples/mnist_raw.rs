//! NRC and CRC on raw 28×28 MNIST pixels (no feature extractor). There is no
//! reference number for this setting; it is a sanity run on a second dataset.
//!
//! Point `NRC_MNIST_MANIFEST` at a manifest for the four IDX files, or place
//! them next to `data/mnist/mnist.toml`.

use std::error::Error;
use std::path::PathBuf;

use nrc::bench::{run_experiment_on, ExperimentConfig, ExperimentData};
use nrc::data_io::{DatasetManifest, SplitSpec};
use nrc::solvers::CoderKind;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let path = std::env::var_os("NRC_MNIST_MANIFEST")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/mnist/mnist.toml")));
    let data = match DatasetManifest::load(&path).and_then(|m| ExperimentData::from_manifest(&m)) {
        Ok(d) => d,
        Err(e) => {
            println!("MNIST unavailable ({e}); set NRC_MNIST_MANIFEST to run this example.");
            return Ok(());
        }
    };
    for per_class in [50, 100] {
        let split = SplitSpec {
            per_class,
            seed: 7,
            trials: 3,
        };
        for coder in [CoderKind::Nnls, CoderKind::Ridge] {
            let report = run_experiment_on(&ExperimentConfig::new(&path, coder, split), &data)?;
            println!(
                "{per_class:>4} per class, {coder:>5}: {:.2}% ± {:.2}",
                100.0 * report.mean_accuracy,
                100.0 * report.stddev_accuracy
            );
        }
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
