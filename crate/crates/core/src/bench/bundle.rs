use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::classifier::{fit, FittedClassifier, LabeledDataset, Prediction};
use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::preprocess::{pca_fit, pca_transform, PcaModel};
use crate::solvers::{CoderKind, SolverConfig};

const BUNDLE_MAGIC: &[u8; 8] = b"NRCBUNDL";
pub const BUNDLE_FORMAT_VERSION: u32 = 1;

/// A fitted classifier plus the optional PCA projection applied to its
/// inputs. PCA statistics come from the training samples only; columns are
/// ℓ2-normalised after projection (inside the classifier).
#[derive(Debug, Clone)]
pub struct ModelBundle {
    pca: Option<PcaModel>,
    classifier: FittedClassifier,
}

impl ModelBundle {
    pub fn fit(
        train: &LabeledDataset,
        coder: CoderKind,
        cfg: SolverConfig,
        pca_dim: Option<usize>,
    ) -> Result<ModelBundle> {
        match pca_dim {
            None => Ok(ModelBundle {
                pca: None,
                classifier: fit(train, coder, cfg)?,
            }),
            Some(d) => {
                let pca = pca_fit(train.features(), d)?;
                let projected = train.with_features(pca_transform(&pca, train.features())?)?;
                Ok(ModelBundle {
                    classifier: fit(&projected, coder, cfg)?,
                    pca: Some(pca),
                })
            }
        }
    }

    pub fn from_parts(pca: Option<PcaModel>, classifier: FittedClassifier) -> Result<ModelBundle> {
        if let Some(p) = &pca {
            if p.output_dim() != classifier.dim() {
                return Err(Error::DimensionMismatch {
                    context: "pca output vs classifier input",
                    expected: classifier.dim(),
                    found: p.output_dim(),
                });
            }
        }
        Ok(ModelBundle { pca, classifier })
    }

    pub fn pca(&self) -> Option<&PcaModel> {
        self.pca.as_ref()
    }

    pub fn classifier(&self) -> &FittedClassifier {
        &self.classifier
    }

    /// Dimension of the raw samples the bundle accepts.
    pub fn input_dim(&self) -> usize {
        self.pca.as_ref().map_or(self.classifier.dim(), PcaModel::input_dim)
    }

    /// Maps raw samples into the classifier's input space.
    pub fn project(&self, x: &DenseMatrix) -> Result<DenseMatrix> {
        match &self.pca {
            Some(p) => pca_transform(p, x),
            None => {
                if x.rows() != self.classifier.dim() {
                    return Err(Error::DimensionMismatch {
                        context: "query dimension",
                        expected: self.classifier.dim(),
                        found: x.rows(),
                    });
                }
                Ok(x.clone())
            }
        }
    }

    pub fn predict_batch(&self, x: &DenseMatrix) -> Result<Vec<Prediction>> {
        self.classifier.predict_batch(&self.project(x)?)
    }

    /// Predicted class values (original label space).
    pub fn predict_labels(&self, x: &DenseMatrix) -> Result<Vec<i64>> {
        Ok(self
            .predict_batch(x)?
            .iter()
            .map(|p| self.classifier.class_value(p.label))
            .collect())
    }

    /// Layout: magic `"NRCBUNDL"`, u32 version, u8 PCA flag, the PCA model
    /// when the flag is 1, then the classifier.
    pub fn write_to<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        w.write_all(BUNDLE_MAGIC)?;
        w.write_all(&BUNDLE_FORMAT_VERSION.to_le_bytes())?;
        w.write_all(&[self.pca.is_some() as u8])?;
        if let Some(p) = &self.pca {
            p.write_to(&mut w)?;
        }
        self.classifier.write_to(&mut w)
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<ModelBundle> {
        let mut head = [0u8; 13];
        r.read_exact(&mut head)
            .map_err(|_| Error::TruncatedFile("model bundle header".into()))?;
        if &head[..8] != BUNDLE_MAGIC {
            return Err(Error::format("model bundle", "bad magic"));
        }
        let version = u32::from_le_bytes(head[8..12].try_into().expect("4 bytes"));
        if version != BUNDLE_FORMAT_VERSION {
            return Err(Error::format("model bundle", format!("unsupported version {version}")));
        }
        let pca = match head[12] {
            0 => None,
            1 => Some(PcaModel::read_from(&mut r)?),
            f => return Err(Error::format("model bundle", format!("bad pca flag {f}"))),
        };
        let classifier = FittedClassifier::read_from(&mut r)?;
        ModelBundle::from_parts(pca, classifier)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let f = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(f);
        self.write_to(&mut w)
            .and_then(|_| w.flush())
            .map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<ModelBundle> {
        let path = path.as_ref();
        let f = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_from(BufReader::new(f))
    }
}
