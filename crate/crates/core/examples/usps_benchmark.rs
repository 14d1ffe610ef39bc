//! The USPS raw-pixel protocol: 50, 100, 200 and 300 training images per
//! digit drawn from the 7291-image training set, all 2007 test images
//! classified, 10 trials per row, ρ (NNLS) or λ (ridge) chosen by 5-fold
//! cross-validation on trial 0.
//!
//! USPS is not bundled. Point `NRC_USPS_MANIFEST` at a dataset manifest, or
//! place `zip.train.gz` and `zip.test.gz` next to `data/usps/usps.toml`.
//!
//! ```text
//! cargo run --release --example usps_benchmark
//! ```

use std::error::Error;
use std::path::PathBuf;

use nrc::bench::{run_experiment_on, ExperimentConfig, ExperimentData};
use nrc::data_io::{DatasetManifest, SplitSpec};
use nrc::solvers::CoderKind;

/// Reference accuracies (%) for 50/100/200/300 samples per class.
const NRC_REFERENCE: [f64; 4] = [92.3, 93.7, 94.6, 95.1];
const CRC_REFERENCE: [f64; 4] = [89.2, 90.6, 91.4, 91.5];
const PER_CLASS: [usize; 4] = [50, 100, 200, 300];

pub fn usps_manifest() -> PathBuf {
    std::env::var_os("NRC_USPS_MANIFEST")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/usps/usps.toml")))
}

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let path = usps_manifest();
    let manifest = match DatasetManifest::load(&path) {
        Ok(m) => m,
        Err(e) => {
            println!("USPS manifest unavailable ({e}); set NRC_USPS_MANIFEST to run this benchmark.");
            return Ok(());
        }
    };
    let data = match ExperimentData::from_manifest(&manifest) {
        Ok(d) => d,
        Err(e) => {
            println!("USPS files unreadable ({e}); see data/usps/usps.toml for the expected layout.");
            return Ok(());
        }
    };
    println!("{:>9} {:>16} {:>16}", "per class", "NNLS (ref)", "ridge (ref)");
    for (row, &per_class) in PER_CLASS.iter().enumerate() {
        let split = SplitSpec {
            per_class,
            seed: 2018,
            trials: 10,
        };
        let mut cells = Vec::new();
        for coder in [CoderKind::Nnls, CoderKind::Ridge] {
            let report = run_experiment_on(&ExperimentConfig::new(&path, coder, split), &data)?;
            cells.push(100.0 * report.mean_accuracy);
        }
        println!(
            "{per_class:>9} {:>8.2} ({:>4.1}) {:>8.2} ({:>4.1})",
            cells[0], NRC_REFERENCE[row], cells[1], CRC_REFERENCE[row]
        );
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
