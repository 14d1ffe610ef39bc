//! Feature pipeline: unit ℓ2 column normalisation and PCA projection.
//!
//! The experiment pipeline always projects first and normalises the projected
//! columns afterwards; normalisation itself happens inside the classifier.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::codec::{Decoder, Encoder, MAX_DIM};
use crate::error::{Error, Result};
use crate::linalg::{axpy, dot, norm2, DenseMatrix, Vector};

/// Columns with an ℓ2 norm below this are treated as zero.
pub const ZERO_NORM: f64 = 1e-12;

/// Scales every column to unit ℓ2 norm.
pub fn l2_normalize_columns(x: &DenseMatrix) -> Result<DenseMatrix> {
    let mut out = x.clone();
    for j in 0..out.cols() {
        let col = out.col_mut(j);
        let n = norm2(col);
        if n.is_nan() || n < ZERO_NORM {
            return Err(Error::ZeroNormSample { column: j });
        }
        if n != 1.0 {
            col.iter_mut().for_each(|v| *v /= n);
        }
    }
    Ok(out)
}

/// A fitted PCA projection.
#[derive(Debug, Clone, PartialEq)]
pub struct PcaModel {
    mean: Vector,
    /// `D × d`, orthonormal columns.
    components: DenseMatrix,
    /// Sample variance along each component, non-increasing.
    explained_variance: Vector,
}

impl PcaModel {
    pub fn mean(&self) -> &Vector {
        &self.mean
    }

    pub fn components(&self) -> &DenseMatrix {
        &self.components
    }

    pub fn explained_variance(&self) -> &Vector {
        &self.explained_variance
    }

    pub fn input_dim(&self) -> usize {
        self.components.rows()
    }

    pub fn output_dim(&self) -> usize {
        self.components.cols()
    }

    /// Maps projected coordinates back to the input space: `mean + C·z`.
    pub fn reconstruct(&self, z: &DenseMatrix) -> Result<DenseMatrix> {
        if z.rows() != self.output_dim() {
            return Err(Error::DimensionMismatch {
                context: "pca reconstruct",
                expected: self.output_dim(),
                found: z.rows(),
            });
        }
        let mut out = self.components.matmul(z)?;
        for j in 0..out.cols() {
            axpy(1.0, &self.mean, out.col_mut(j));
        }
        Ok(out)
    }
}

/// Centred PCA keeping the top `d` components.
///
/// Eigenvectors come from the `D × D` covariance, or from the `N × N` Gram
/// matrix of the centred samples when `N < D`. Each component's sign is fixed
/// so its largest-magnitude entry is positive. Variances use the `N − 1`
/// denominator.
pub fn pca_fit(x: &DenseMatrix, d: usize) -> Result<PcaModel> {
    let (dim, n) = (x.rows(), x.cols());
    if d == 0 || d > dim.min(n) {
        return Err(Error::BadDimension(format!(
            "pca dimension {d} must be in 1..={}",
            dim.min(n)
        )));
    }
    let mut mean = vec![0.0; dim];
    for c in x.columns() {
        axpy(1.0, c, &mut mean);
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);
    let mut centered = x.clone();
    for j in 0..n {
        axpy(-1.0, &mean, centered.col_mut(j));
    }
    let denom = (n.max(2) - 1) as f64;

    let mut components = DenseMatrix::zeros(dim, d);
    let mut variances = Vec::with_capacity(d);
    if n < dim {
        let (values, vectors) = sorted_eigen(&centered.gram());
        for i in 0..d {
            let v = &vectors[i];
            let u = centered.matvec(v, false)?;
            let nu = norm2(&u);
            let col = components.col_mut(i);
            if nu > 1e-10 * values[0].abs().sqrt().max(1.0) {
                col.iter_mut().zip(u.iter()).for_each(|(c, ui)| *c = ui / nu);
            }
            variances.push(values[i].max(0.0) / denom);
        }
    } else {
        let (values, vectors) = sorted_eigen(&centered.outer_gram());
        for i in 0..d {
            components.col_mut(i).copy_from_slice(&vectors[i]);
            variances.push(values[i].max(0.0) / denom);
        }
    }
    orthonormalize(&mut components);
    for j in 0..d {
        fix_sign(components.col_mut(j));
    }
    Ok(PcaModel {
        mean: Vector::from(mean),
        components,
        explained_variance: Vector::from(variances),
    })
}

/// `Cᵀ(x − mean)` for every column.
pub fn pca_transform(model: &PcaModel, x: &DenseMatrix) -> Result<DenseMatrix> {
    if x.rows() != model.input_dim() {
        return Err(Error::DimensionMismatch {
            context: "pca transform",
            expected: model.input_dim(),
            found: x.rows(),
        });
    }
    let d = model.output_dim();
    let mut out = DenseMatrix::zeros(d, x.cols());
    let mut centered = vec![0.0; x.rows()];
    for j in 0..x.cols() {
        for ((c, xi), mi) in centered.iter_mut().zip(x.col(j)).zip(model.mean.iter()) {
            *c = xi - mi;
        }
        let dst = out.col_mut(j);
        for (k, slot) in dst.iter_mut().enumerate() {
            *slot = dot(model.components.col(k), &centered);
        }
    }
    Ok(out)
}

/// Eigenpairs of a symmetric matrix in non-increasing eigenvalue order.
fn sorted_eigen(m: &DenseMatrix) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = m.rows();
    let eig = SymmetricEigen::new(DMatrix::from_column_slice(n, n, m.as_slice()));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = order
        .iter()
        .map(|&i| eig.eigenvectors.column(i).iter().copied().collect())
        .collect();
    (values, vectors)
}

/// Two passes of modified Gram-Schmidt; columns that vanish are replaced by
/// the first standard basis vector that is not already spanned.
fn orthonormalize(m: &mut DenseMatrix) {
    let (rows, cols) = (m.rows(), m.cols());
    let mut basis_candidate = 0;
    for j in 0..cols {
        let mut attempts = 0;
        loop {
            for _ in 0..2 {
                for k in 0..j {
                    let prev = m.col(k).to_vec();
                    let p = dot(&prev, m.col(j));
                    axpy(-p, &prev, m.col_mut(j));
                }
            }
            let n = norm2(m.col(j));
            if n > 1e-8 || attempts > rows {
                let col = m.col_mut(j);
                col.iter_mut().for_each(|v| *v /= n);
                break;
            }
            let col = m.col_mut(j);
            col.iter_mut().for_each(|v| *v = 0.0);
            col[basis_candidate % rows] = 1.0;
            basis_candidate += 1;
            attempts += 1;
        }
    }
}

fn fix_sign(col: &mut [f64]) {
    let mut best = 0;
    for (i, v) in col.iter().enumerate() {
        if v.abs() > col[best].abs() {
            best = i;
        }
    }
    if col[best] < 0.0 {
        col.iter_mut().for_each(|v| *v = -*v);
    }
}

const PCA_MAGIC: &[u8; 8] = b"NRCPCAMD";
pub const PCA_FORMAT_VERSION: u32 = 1;

impl PcaModel {
    /// Layout: magic `"NRCPCAMD"`, u32 version, u64 D, u64 d, then f64 mean
    /// (D), components (D·d, column-major) and explained variances (d), all
    /// little-endian.
    pub fn write_to<W: Write>(&self, w: W) -> std::io::Result<()> {
        let mut e = Encoder::new(w);
        e.bytes(PCA_MAGIC)?;
        e.u32(PCA_FORMAT_VERSION)?;
        e.u64(self.input_dim() as u64)?;
        e.u64(self.output_dim() as u64)?;
        e.f64s(&self.mean)?;
        e.f64s(self.components.as_slice())?;
        e.f64s(&self.explained_variance)
    }

    pub fn read_from<R: Read>(r: R) -> Result<PcaModel> {
        let mut d = Decoder::new(r, "pca model");
        if &d.array::<8>()? != PCA_MAGIC {
            return Err(Error::format("pca model", "bad magic"));
        }
        let version = d.u32()?;
        if version != PCA_FORMAT_VERSION {
            return Err(Error::format("pca model", format!("unsupported version {version}")));
        }
        let dim = d.len(MAX_DIM)?;
        let k = d.len(MAX_DIM)?;
        let mean = Vector::new(d.f64s(dim)?)?;
        let components = DenseMatrix::new(dim, k, d.f64s(dim * k)?)?;
        let explained_variance = Vector::new(d.f64s(k)?)?;
        Ok(PcaModel {
            mean,
            components,
            explained_variance,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let f = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(f);
        self.write_to(&mut w)
            .and_then(|_| w.flush())
            .map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<PcaModel> {
        let path = path.as_ref();
        let f = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_from(BufReader::new(f))
    }
}
