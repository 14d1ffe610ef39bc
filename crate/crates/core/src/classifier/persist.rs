//! Binary model format, all integers and floats little-endian:
//!
//! ```text
//! magic        8 bytes  "NRCMODEL"
//! version      u32      MODEL_FORMAT_VERSION
//! coder        u8       0 = nnls, 1 = ridge, 2 = lasso
//! rho          f64
//! max_iters    u64
//! tol          f64
//! lambda       f64
//! D, N, K      u64 ×3
//! class values i64 × K  (original label of each class index)
//! labels       u32 × N  (class index of each dictionary column)
//! dictionary   f64 × D·N, column-major, unit-norm columns
//! ```
//!
//! The factorization is not stored; it is rebuilt deterministically on load.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::FittedClassifier;
use crate::codec::{Decoder, Encoder, MAX_DIM};
use crate::error::{Error, Result};
use crate::linalg::{norm2, DenseMatrix};
use crate::solvers::{CoderKind, SolverConfig};

const MAGIC: &[u8; 8] = b"NRCMODEL";
pub const MODEL_FORMAT_VERSION: u32 = 1;

fn coder_tag(c: CoderKind) -> u8 {
    match c {
        CoderKind::Nnls => 0,
        CoderKind::Ridge => 1,
        CoderKind::Lasso => 2,
    }
}

impl FittedClassifier {
    pub fn write_to<W: Write>(&self, w: W) -> std::io::Result<()> {
        let mut e = Encoder::new(w);
        e.bytes(MAGIC)?;
        e.u32(MODEL_FORMAT_VERSION)?;
        e.u8(coder_tag(self.coder))?;
        e.f64(self.config.rho)?;
        e.u64(self.config.max_iters as u64)?;
        e.f64(self.config.tol)?;
        e.f64(self.config.lambda)?;
        e.u64(self.dictionary.rows() as u64)?;
        e.u64(self.dictionary.cols() as u64)?;
        e.u64(self.class_values.len() as u64)?;
        for v in &self.class_values {
            e.i64(*v)?;
        }
        for l in &self.labels {
            e.u32(*l as u32)?;
        }
        e.f64s(self.dictionary.as_slice())
    }

    pub fn read_from<R: Read>(r: R) -> Result<FittedClassifier> {
        let mut d = Decoder::new(r, "model file");
        if &d.array::<8>()? != MAGIC {
            return Err(Error::format("model file", "bad magic"));
        }
        let version = d.u32()?;
        if version != MODEL_FORMAT_VERSION {
            return Err(Error::format(
                "model file",
                format!("unsupported version {version}"),
            ));
        }
        let coder = match d.u8()? {
            0 => CoderKind::Nnls,
            1 => CoderKind::Ridge,
            2 => CoderKind::Lasso,
            t => return Err(Error::format("model file", format!("unknown coder tag {t}"))),
        };
        let config = SolverConfig {
            rho: d.f64()?,
            max_iters: d.len(u64::MAX >> 1)?,
            tol: d.f64()?,
            lambda: d.f64()?,
        };
        let dim = d.len(MAX_DIM)?;
        let n = d.len(MAX_DIM)?;
        let k = d.len(MAX_DIM)?;
        let class_values = (0..k).map(|_| d.i64()).collect::<Result<Vec<_>>>()?;
        let labels = (0..n)
            .map(|_| {
                let l = d.u32()? as usize;
                if l >= k {
                    return Err(Error::format("model file", format!("label {l} out of range")));
                }
                Ok(l)
            })
            .collect::<Result<Vec<_>>>()?;
        let dictionary = DenseMatrix::new(dim, n, d.f64s(dim * n)?)?;
        if let Some(j) = dictionary
            .columns()
            .position(|c| (norm2(c) - 1.0).abs() > 1e-12)
        {
            return Err(Error::format(
                "model file",
                format!("dictionary column {j} is not unit norm"),
            ));
        }
        FittedClassifier::assemble(dictionary, labels, class_values, coder, config)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let f = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(f);
        self.write_to(&mut w)
            .and_then(|_| w.flush())
            .map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<FittedClassifier> {
        let path = path.as_ref();
        let f = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_from(BufReader::new(f))
    }
}

#[cfg(test)]
mod tests {
    use super::super::{fit, LabeledDataset};
    use super::*;

    #[test]
    fn round_trip_preserves_predictions() {
        let x = DenseMatrix::from_columns(&[[1.0, 0.2, 0.0], [0.0, 1.0, 0.3], [0.5, 0.0, 1.0]]).unwrap();
        let d = LabeledDataset::from_raw_labels(x, &[10, 20, 20]).unwrap();
        for (coder, cfg) in [
            (CoderKind::Nnls, SolverConfig::default()),
            (CoderKind::Ridge, SolverConfig::default().with_lambda(0.01)),
            (CoderKind::Lasso, SolverConfig::default().with_lambda(0.01)),
        ] {
            let clf = fit(&d, coder, cfg).unwrap();
            let mut buf = Vec::new();
            clf.write_to(&mut buf).unwrap();
            let back = FittedClassifier::read_from(buf.as_slice()).unwrap();
            assert_eq!(back.dictionary(), clf.dictionary());
            assert_eq!(back.class_values(), clf.class_values());
            assert_eq!(back.labels(), clf.labels());
            assert_eq!(back.coder(), coder);
            assert_eq!(back.config(), clf.config());
            let q = [0.3, 0.4, 0.5];
            assert_eq!(back.predict(&q).unwrap(), clf.predict(&q).unwrap());
        }
    }

    #[test]
    fn rejects_corrupt_files() {
        assert!(FittedClassifier::read_from(&b"NOTAMODEL"[..]).is_err());
        let x = DenseMatrix::identity(2);
        let d = LabeledDataset::from_raw_labels(x, &[0, 1]).unwrap();
        let clf = fit(&d, CoderKind::Nnls, SolverConfig::default()).unwrap();
        let mut buf = Vec::new();
        clf.write_to(&mut buf).unwrap();
        buf.truncate(buf.len() - 3);
        assert!(matches!(
            FittedClassifier::read_from(buf.as_slice()),
            Err(Error::TruncatedFile(_))
        ));
    }
}
