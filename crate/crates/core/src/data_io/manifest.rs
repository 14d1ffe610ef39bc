use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::delimited::{read_delimited, DelimitedSchema};
use super::idx::read_idx_pair;
use super::RawDataset;
use crate::error::{Error, Result};

/// On-disk format of a dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DataFormat {
    Idx,
    Delimited,
}

/// Files making up one partition (train or test).
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionFiles {
    /// Delimited text files, concatenated in order.
    #[serde(default)]
    pub files: Vec<PathBuf>,
    /// IDX image tensor.
    #[serde(default)]
    pub images: Option<PathBuf>,
    /// IDX label vector.
    #[serde(default)]
    pub labels: Option<PathBuf>,
}

/// A small TOML file describing where a dataset lives and how to read it.
/// Relative paths are resolved against the manifest's directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetManifest {
    pub name: String,
    pub format: DataFormat,
    /// Number of distinct class labels the data must contain.
    pub classes: usize,
    #[serde(default)]
    pub delimited: DelimitedSchema,
    pub train: PartitionFiles,
    /// Fixed test partition. Without one, experiments test on the samples
    /// not drawn for training.
    #[serde(default)]
    pub test: Option<PartitionFiles>,
    #[serde(skip)]
    base_dir: PathBuf,
}

impl DatasetManifest {
    pub fn parse(text: &str, base_dir: impl Into<PathBuf>) -> Result<Self> {
        let mut m: DatasetManifest =
            toml::from_str(text).map_err(|e| Error::format("dataset manifest", e.to_string()))?;
        m.base_dir = base_dir.into();
        Ok(m)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&text, base)
    }

    fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    fn read_partition(&self, part: &PartitionFiles, which: &str) -> Result<RawDataset> {
        let data = match self.format {
            DataFormat::Delimited => {
                if part.files.is_empty() {
                    return Err(Error::format("dataset manifest", format!("{which}: no files listed")));
                }
                let parts = part
                    .files
                    .iter()
                    .map(|f| read_delimited(self.resolve(f), &self.delimited))
                    .collect::<Result<Vec<_>>>()?;
                RawDataset::concat(&parts)?
            }
            DataFormat::Idx => match (&part.images, &part.labels) {
                (Some(i), Some(l)) => read_idx_pair(self.resolve(i), self.resolve(l))?,
                _ => {
                    return Err(Error::format(
                        "dataset manifest",
                        format!("{which}: idx format needs `images` and `labels`"),
                    ))
                }
            },
        };
        let distinct = data.distinct_labels();
        if distinct.len() != self.classes {
            return Err(Error::format(
                "dataset",
                format!(
                    "{which} partition of {} has {} classes, manifest declares {}",
                    self.name,
                    distinct.len(),
                    self.classes
                ),
            ));
        }
        Ok(data)
    }

    pub fn read_train(&self) -> Result<RawDataset> {
        self.read_partition(&self.train, "train")
    }

    pub fn read_test(&self) -> Result<Option<RawDataset>> {
        self.test
            .as_ref()
            .map(|t| self.read_partition(t, "test"))
            .transpose()
    }
}
