//! Dataset ingestion (IDX tensors, delimited text, manifests) and the seeded
//! stratified sampling used by the experiment protocol.

mod delimited;
mod idx;
mod manifest;
mod sampling;

pub use delimited::{parse_delimited, read_delimited, DelimitedSchema, Delimiter};
pub use idx::{parse_idx, read_idx, read_idx_pair, write_idx_images, write_idx_labels, IdxContent};
pub use manifest::{DataFormat, DatasetManifest, PartitionFiles};
pub use sampling::{
    stratified_folds, stratified_indices, stratified_sample, SampleStream, SplitSpec, StreamPurpose,
};

use std::io::Read;
use std::path::Path;

use flate2::read::GzDecoder;

use crate::classifier::LabeledDataset;
use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

/// Features as columns with their raw integer labels, as read from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct RawDataset {
    features: DenseMatrix,
    labels: Vec<i64>,
    source: String,
}

impl RawDataset {
    pub fn new(features: DenseMatrix, labels: Vec<i64>, source: String) -> Result<Self> {
        if labels.len() != features.cols() {
            return Err(Error::DimensionMismatch {
                context: "label count",
                expected: features.cols(),
                found: labels.len(),
            });
        }
        Ok(RawDataset {
            features,
            labels,
            source,
        })
    }

    pub fn features(&self) -> &DenseMatrix {
        &self.features
    }

    pub fn labels(&self) -> &[i64] {
        &self.labels
    }

    /// Where the data came from.
    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn distinct_labels(&self) -> Vec<i64> {
        let mut v = self.labels.clone();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Canonicalises labels over the classes present.
    pub fn to_labeled(&self) -> Result<LabeledDataset> {
        LabeledDataset::from_raw_labels(self.features.clone(), &self.labels)
    }

    /// Canonicalises labels over a fixed class list.
    pub fn to_labeled_with(&self, classes: &[i64]) -> Result<LabeledDataset> {
        LabeledDataset::with_classes(self.features.clone(), &self.labels, classes.to_vec())
    }

    /// Appends datasets with equal feature dimension; empty parts are skipped.
    pub fn concat(parts: &[RawDataset]) -> Result<RawDataset> {
        let non_empty: Vec<&RawDataset> = parts.iter().filter(|p| !p.is_empty()).collect();
        let dim = non_empty.first().map_or(0, |p| p.features.rows());
        let mut data = Vec::new();
        let mut labels = Vec::new();
        for p in &non_empty {
            if p.features.rows() != dim {
                return Err(Error::DimensionMismatch {
                    context: "concatenated feature dimension",
                    expected: dim,
                    found: p.features.rows(),
                });
            }
            data.extend_from_slice(p.features.as_slice());
            labels.extend_from_slice(&p.labels);
        }
        let source = parts.iter().map(|p| p.source.as_str()).collect::<Vec<_>>().join(";");
        let n = labels.len();
        RawDataset::new(DenseMatrix::new(dim, n, data)?, labels, source)
    }
}

/// Reads a file, transparently inflating it when it starts with the gzip magic.
pub(crate) fn read_maybe_gzip(path: &Path) -> Result<Vec<u8>> {
    let raw = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    if raw.starts_with(&[0x1f, 0x8b]) {
        let mut out = Vec::new();
        GzDecoder::new(raw.as_slice())
            .read_to_end(&mut out)
            .map_err(|e| Error::io(path, e))?;
        Ok(out)
    } else {
        Ok(raw)
    }
}
