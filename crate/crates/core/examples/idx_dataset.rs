//! Writing a tiny MNIST-style IDX pair, describing it with a dataset
//! manifest and drawing a stratified training set from it.

use std::error::Error;

use nrc::data_io::{stratified_sample, write_idx_images, write_idx_labels, DatasetManifest, SplitSpec};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let dir = tempfile::tempdir()?;
    let (items, h, w) = (12, 4, 4);
    // class k lights up row k of the 4×4 image
    let labels: Vec<u8> = (0..items).map(|i| (i % 4) as u8).collect();
    let mut pixels = vec![0u8; items * h * w];
    for (i, &k) in labels.iter().enumerate() {
        for c in 0..w {
            pixels[i * h * w + k as usize * w + c] = 200 + i as u8;
        }
    }
    write_idx_images(dir.path().join("images.idx"), items, h, w, &pixels)?;
    write_idx_labels(dir.path().join("labels.idx"), &labels)?;
    std::fs::write(
        dir.path().join("tiny.toml"),
        "name = \"tiny\"\nformat = \"idx\"\nclasses = 4\n[train]\nimages = \"images.idx\"\nlabels = \"labels.idx\"\n",
    )?;

    let manifest = DatasetManifest::load(dir.path().join("tiny.toml"))?;
    let data = manifest.read_train()?;
    println!(
        "read {} samples of dimension {} from {}",
        data.len(),
        data.features().rows(),
        data.source()
    );
    let spec = SplitSpec {
        per_class: 2,
        seed: 3,
        trials: 1,
    };
    let (train, rest) = stratified_sample(&data, &spec, 0)?;
    println!("train {} samples, remainder {}", train.len(), rest.len());
    for k in 0..train.num_classes() {
        println!("  class {}: {} drawn", train.class_values()[k], train.class_index()[k].len());
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
