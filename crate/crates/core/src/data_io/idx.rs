//! IDX tensors as used by MNIST: a big-endian magic `0x0000TTNN` (`TT` element
//! type, `NN` number of dimensions), `NN` big-endian u32 sizes, then the
//! payload. Only unsigned-byte tensors (`TT = 0x08`) are supported.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::read_maybe_gzip;
use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

const UBYTE: u8 = 0x08;
const KNOWN_TYPES: [u8; 6] = [0x08, 0x09, 0x0B, 0x0C, 0x0D, 0x0E];

/// Decoded contents of an IDX file.
#[derive(Debug, Clone, PartialEq)]
pub enum IdxContent {
    /// One column per item, pixels scaled to `[0, 1]`. `shape` is the
    /// per-item shape (e.g. `[28, 28]`), flattened row-major into each column.
    Images { samples: DenseMatrix, shape: Vec<usize> },
    /// A 1-D label vector.
    Labels(Vec<u8>),
}

pub fn read_idx(path: impl AsRef<Path>) -> Result<IdxContent> {
    let path = path.as_ref();
    let bytes = read_maybe_gzip(path)?;
    parse_idx(&bytes)
}

pub fn parse_idx(bytes: &[u8]) -> Result<IdxContent> {
    if bytes.len() < 4 {
        return Err(Error::TruncatedFile("IDX header".into()));
    }
    let magic = u32::from_be_bytes(bytes[..4].try_into().expect("4 bytes"));
    let (elem, ndims) = (bytes[2], bytes[3] as usize);
    if bytes[0] != 0 || bytes[1] != 0 || ndims == 0 || !KNOWN_TYPES.contains(&elem) {
        return Err(Error::BadMagic(magic));
    }
    if elem != UBYTE {
        return Err(Error::UnsupportedElementType(elem));
    }
    let header = 4 + 4 * ndims;
    if bytes.len() < header {
        return Err(Error::TruncatedFile("IDX dimension sizes".into()));
    }
    let dims: Vec<usize> = bytes[4..header]
        .chunks_exact(4)
        .map(|c| u32::from_be_bytes(c.try_into().expect("4 bytes")) as usize)
        .collect();
    let count = dims.iter().try_fold(1usize, |a, &d| a.checked_mul(d));
    let count = count.ok_or_else(|| Error::format("IDX file", "dimension product overflows"))?;
    let payload = &bytes[header..];
    if payload.len() < count {
        return Err(Error::TruncatedFile(format!(
            "IDX payload: expected {count} bytes, found {}",
            payload.len()
        )));
    }
    let payload = &payload[..count];
    if ndims == 1 {
        return Ok(IdxContent::Labels(payload.to_vec()));
    }
    let items = dims[0];
    let shape = dims[1..].to_vec();
    let per_item: usize = shape.iter().product();
    let data = payload.iter().map(|&p| p as f64 / 255.0).collect();
    Ok(IdxContent::Images {
        samples: DenseMatrix::new(per_item, items, data)?,
        shape,
    })
}

fn encode(dims: &[usize], payload: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(4 + 4 * dims.len() + payload.len());
    out.extend_from_slice(&[0, 0, UBYTE, dims.len() as u8]);
    for &d in dims {
        out.extend_from_slice(&(d as u32).to_be_bytes());
    }
    out.extend_from_slice(payload);
    out
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    let f = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(f);
    w.write_all(bytes)
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

/// Writes `items` images of `height × width` bytes (row-major per image).
pub fn write_idx_images(
    path: impl AsRef<Path>,
    items: usize,
    height: usize,
    width: usize,
    pixels: &[u8],
) -> Result<()> {
    if pixels.len() != items * height * width {
        return Err(Error::DimensionMismatch {
            context: "IDX image payload",
            expected: items * height * width,
            found: pixels.len(),
        });
    }
    write_bytes(path.as_ref(), &encode(&[items, height, width], pixels))
}

pub fn write_idx_labels(path: impl AsRef<Path>, labels: &[u8]) -> Result<()> {
    write_bytes(path.as_ref(), &encode(&[labels.len()], labels))
}

/// Reads an image file and a label file into one dataset.
pub fn read_idx_pair(images: impl AsRef<Path>, labels: impl AsRef<Path>) -> Result<super::RawDataset> {
    let (images, labels) = (images.as_ref(), labels.as_ref());
    let samples = match read_idx(images)? {
        IdxContent::Images { samples, .. } => samples,
        IdxContent::Labels(_) => {
            return Err(Error::format("IDX file", format!("{} holds labels, not images", images.display())))
        }
    };
    let labels_vec = match read_idx(labels)? {
        IdxContent::Labels(l) => l,
        IdxContent::Images { .. } => {
            return Err(Error::format("IDX file", format!("{} holds images, not labels", labels.display())))
        }
    };
    super::RawDataset::new(
        samples,
        labels_vec.into_iter().map(i64::from).collect(),
        format!("idx:{}+{}", images.display(), labels.display()),
    )
}
