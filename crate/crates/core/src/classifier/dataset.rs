use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

/// Samples as matrix columns, each with a class.
///
/// Class identifiers are canonicalised to `0..K` in ascending order of the
/// original label values; [`LabeledDataset::class_values`] maps them back.
/// A class may be empty here (for example in a hold-out remainder); fitting a
/// classifier rejects empty classes.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    features: DenseMatrix,
    labels: Vec<usize>,
    class_values: Vec<i64>,
    class_index: Vec<Vec<usize>>,
}

impl LabeledDataset {
    /// Canonicalises `labels` using the sorted set of values that occur.
    pub fn from_raw_labels(features: DenseMatrix, labels: &[i64]) -> Result<Self> {
        let mut classes = labels.to_vec();
        classes.sort_unstable();
        classes.dedup();
        Self::with_classes(features, labels, classes)
    }

    /// Canonicalises `labels` against a fixed class list, so that several
    /// partitions of one dataset share class indices.
    pub fn with_classes(features: DenseMatrix, labels: &[i64], mut class_values: Vec<i64>) -> Result<Self> {
        class_values.sort_unstable();
        class_values.dedup();
        let canonical = labels
            .iter()
            .map(|l| class_values.binary_search(l).map_err(|_| Error::UnknownLabel(*l)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_canonical(features, canonical, class_values)
    }

    /// Builds from already-canonical labels in `0..class_values.len()`.
    pub fn from_canonical(features: DenseMatrix, labels: Vec<usize>, class_values: Vec<i64>) -> Result<Self> {
        if labels.len() != features.cols() {
            return Err(Error::DimensionMismatch {
                context: "label count",
                expected: features.cols(),
                found: labels.len(),
            });
        }
        let k = class_values.len();
        let mut class_index = vec![Vec::new(); k];
        for (j, &l) in labels.iter().enumerate() {
            if l >= k {
                return Err(Error::BadDimension(format!(
                    "label index {l} out of range for {k} classes"
                )));
            }
            class_index[l].push(j);
        }
        Ok(LabeledDataset {
            features,
            labels,
            class_values,
            class_index,
        })
    }

    pub fn features(&self) -> &DenseMatrix {
        &self.features
    }

    /// Canonical class of each column.
    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn class_values(&self) -> &[i64] {
        &self.class_values
    }

    /// Column positions of every class.
    pub fn class_index(&self) -> &[Vec<usize>] {
        &self.class_index
    }

    pub fn num_classes(&self) -> usize {
        self.class_values.len()
    }

    /// Number of samples N.
    pub fn len(&self) -> usize {
        self.features.cols()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Feature dimension D.
    pub fn dim(&self) -> usize {
        self.features.rows()
    }

    /// The selected samples, in the given order, with the same class list.
    pub fn subset(&self, indices: &[usize]) -> LabeledDataset {
        let features = self.features.select_columns(indices);
        let labels: Vec<usize> = indices.iter().map(|&j| self.labels[j]).collect();
        let mut class_index = vec![Vec::new(); self.num_classes()];
        for (j, &l) in labels.iter().enumerate() {
            class_index[l].push(j);
        }
        LabeledDataset {
            features,
            labels,
            class_values: self.class_values.clone(),
            class_index,
        }
    }

    /// Same samples with new features (e.g. after a projection).
    pub fn with_features(&self, features: DenseMatrix) -> Result<LabeledDataset> {
        if features.cols() != self.len() {
            return Err(Error::DimensionMismatch {
                context: "replacement features",
                expected: self.len(),
                found: features.cols(),
            });
        }
        Ok(LabeledDataset {
            features,
            ..self.clone()
        })
    }

    /// Same samples with replaced canonical labels.
    pub fn with_labels(&self, labels: Vec<usize>) -> Result<LabeledDataset> {
        Self::from_canonical(self.features.clone(), labels, self.class_values.clone())
    }
}
