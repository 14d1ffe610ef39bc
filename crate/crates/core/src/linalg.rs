//! Dense column-major matrices, vectors and symmetric positive-definite solves.
//!
//! Everything here is double precision and immutable once built, so the types
//! can be shared across worker threads without synchronisation.

use std::ops::{Deref, DerefMut};

use crate::error::{Error, Result};

/// A dense real vector.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Vector(Vec<f64>);

impl Vector {
    /// Checked constructor: rejects NaN and infinities.
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if let Some(index) = entries.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                context: "vector",
                index,
            });
        }
        Ok(Vector(entries))
    }

    pub fn zeros(len: usize) -> Self {
        Vector(vec![0.0; len])
    }

    /// The `index`-th standard basis vector of length `len`.
    pub fn unit(len: usize, index: usize) -> Self {
        let mut v = Self::zeros(len);
        v.0[index] = 1.0;
        v
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn norm2(&self) -> f64 {
        norm2(&self.0)
    }

    pub fn norm_inf(&self) -> f64 {
        self.0.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scaled(&self, alpha: f64) -> Vector {
        Vector(self.0.iter().map(|v| alpha * v).collect())
    }
}

impl From<Vec<f64>> for Vector {
    fn from(v: Vec<f64>) -> Self {
        Vector(v)
    }
}

impl FromIterator<f64> for Vector {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        Vector(iter.into_iter().collect())
    }
}

impl Deref for Vector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl DerefMut for Vector {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

/// Dense matrix stored column by column. When used as a dictionary each
/// column is one sample.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    /// Builds a matrix from column-major entries.
    ///
    /// Zero-column matrices are accepted so that empty query batches and empty
    /// hold-out partitions can be represented; solvers reject them where needed.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                context: "matrix entries",
                expected: rows * cols,
                found: data.len(),
            });
        }
        if let Some(index) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                context: "matrix",
                index,
            });
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    /// Builds a matrix whose columns are the given slices.
    pub fn from_columns<C: AsRef<[f64]>>(columns: &[C]) -> Result<Self> {
        let rows = columns.first().map_or(0, |c| c.as_ref().len());
        let mut data = Vec::with_capacity(rows * columns.len());
        for c in columns {
            let c = c.as_ref();
            if c.len() != rows {
                return Err(Error::DimensionMismatch {
                    context: "column length",
                    expected: rows,
                    found: c.len(),
                });
            }
            data.extend_from_slice(c);
        }
        Self::new(rows, columns.len(), data)
    }

    /// Builds a matrix from row slices (convenient for literals in tests).
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = vec![0.0; nrows * ncols];
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != ncols {
                return Err(Error::DimensionMismatch {
                    context: "row length",
                    expected: ncols,
                    found: r.len(),
                });
            }
            for (j, v) in r.iter().enumerate() {
                data[j * nrows + i] = *v;
            }
        }
        Self::new(nrows, ncols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Column-major entries.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[col * self.rows + row]
    }

    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.data[col * self.rows + row] = value;
    }

    pub fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn col_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn columns(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        // chunks_exact panics on a zero chunk size
        let step = self.rows.max(1);
        (0..self.cols).map(move |j| &self.data[j * step..j * step + self.rows])
    }

    /// New matrix made of the selected columns, in the given order.
    pub fn select_columns(&self, indices: &[usize]) -> DenseMatrix {
        let mut data = Vec::with_capacity(self.rows * indices.len());
        for &j in indices {
            data.extend_from_slice(self.col(j));
        }
        DenseMatrix {
            rows: self.rows,
            cols: indices.len(),
            data,
        }
    }

    pub fn transpose(&self) -> DenseMatrix {
        let mut t = DenseMatrix::zeros(self.cols, self.rows);
        for j in 0..self.cols {
            for i in 0..self.rows {
                t.data[i * self.cols + j] = self.data[j * self.rows + i];
            }
        }
        t
    }

    /// `X·v`, or `Xᵀ·v` when `transposed` is set.
    pub fn matvec(&self, v: &[f64], transposed: bool) -> Result<Vector> {
        if transposed {
            if v.len() != self.rows {
                return Err(Error::DimensionMismatch {
                    context: "transposed matvec",
                    expected: self.rows,
                    found: v.len(),
                });
            }
            Ok(self.columns().map(|c| dot(c, v)).collect())
        } else {
            if v.len() != self.cols {
                return Err(Error::DimensionMismatch {
                    context: "matvec",
                    expected: self.cols,
                    found: v.len(),
                });
            }
            let mut out = vec![0.0; self.rows];
            for (c, &a) in self.columns().zip(v) {
                if a != 0.0 {
                    axpy(a, c, &mut out);
                }
            }
            Ok(Vector(out))
        }
    }

    /// `XᵀX`, the `cols × cols` Gram matrix. Exactly symmetric.
    pub fn gram(&self) -> DenseMatrix {
        let n = self.cols;
        let mut g = DenseMatrix::zeros(n, n);
        for j in 0..n {
            let cj = self.col(j);
            for i in 0..=j {
                let v = dot(self.col(i), cj);
                g.data[j * n + i] = v;
                g.data[i * n + j] = v;
            }
        }
        g
    }

    /// `XXᵀ`, the `rows × rows` outer Gram matrix. Exactly symmetric.
    pub fn outer_gram(&self) -> DenseMatrix {
        let d = self.rows;
        let mut g = DenseMatrix::zeros(d, d);
        for c in self.columns() {
            for (b, &cb) in c.iter().enumerate() {
                if cb == 0.0 {
                    continue;
                }
                axpy(cb, &c[..=b], &mut g.data[b * d..b * d + b + 1]);
            }
        }
        for b in 0..d {
            for a in 0..b {
                g.data[a * d + b] = g.data[b * d + a];
            }
        }
        g
    }

    /// Dense product `self · other`.
    pub fn matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                context: "matmul",
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = DenseMatrix::zeros(self.rows, other.cols);
        for j in 0..other.cols {
            let dst = &mut out.data[j * self.rows..(j + 1) * self.rows];
            for (k, &b) in other.col(j).iter().enumerate() {
                if b != 0.0 {
                    axpy(b, self.col(k), dst);
                }
            }
        }
        Ok(out)
    }
}

/// Cholesky factor `L` of `A + ridge·I`, with `LLᵀ = A + ridge·I`.
#[derive(Debug, Clone)]
pub struct SpdFactor {
    dim: usize,
    // lower triangle, row-major, so row prefixes are contiguous
    lower: Vec<f64>,
}

/// Relative pivot floor below which the factorization is declared singular.
const PIVOT_FLOOR: f64 = 1e-13;

impl SpdFactor {
    pub fn dimension(&self) -> usize {
        self.dim
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.lower[i * self.dim..i * self.dim + i + 1]
    }

    /// Solves `(A + ridge·I) x = b` in place.
    pub fn solve_in_place(&self, b: &mut [f64]) -> Result<()> {
        let n = self.dim;
        if b.len() != n {
            return Err(Error::DimensionMismatch {
                context: "spd solve",
                expected: n,
                found: b.len(),
            });
        }
        for i in 0..n {
            let row = self.row(i);
            b[i] = (b[i] - dot(&row[..i], &b[..i])) / row[i];
        }
        for i in (0..n).rev() {
            let row = self.row(i);
            let xi = b[i] / row[i];
            b[i] = xi;
            if xi != 0.0 {
                axpy(-xi, &row[..i], &mut b[..i]);
            }
        }
        Ok(())
    }
}

/// Factors `A + ridge·I` for symmetric `A`; only the lower triangle of `A` is read.
pub fn spd_factor(a: &DenseMatrix, ridge: f64) -> Result<SpdFactor> {
    let n = a.rows();
    if a.cols() != n {
        return Err(Error::DimensionMismatch {
            context: "spd factor (square)",
            expected: n,
            found: a.cols(),
        });
    }
    if n == 0 {
        return Err(Error::BadDimension("cannot factor an empty matrix".into()));
    }
    if !(ridge >= 0.0 && ridge.is_finite()) {
        return Err(Error::InvalidConfig(format!("ridge must be finite and >= 0, got {ridge}")));
    }
    let scale = (0..n).map(|i| a.get(i, i).abs() + ridge).fold(0.0, f64::max);
    let floor = PIVOT_FLOOR * scale;
    let mut lower = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let (ri, rj) = (&lower[i * n..i * n + j], &lower[j * n..j * n + j]);
            let mut s = a.get(i, j) - dot(ri, rj);
            if i == j {
                s += ridge;
                if s.is_nan() || s <= floor || !s.is_finite() {
                    return Err(Error::NotPositiveDefinite { pivot: i, value: s });
                }
                lower[i * n + i] = s.sqrt();
            } else {
                lower[i * n + j] = s / lower[j * n + j];
            }
        }
    }
    Ok(SpdFactor { dim: n, lower })
}

pub fn solve_spd(factor: &SpdFactor, b: &[f64]) -> Result<Vector> {
    let mut x = b.to_vec();
    factor.solve_in_place(&mut x)?;
    Ok(Vector(x))
}

/// Inner product with four independent accumulators.
#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let n = a.len().min(b.len());
    let (a, b) = (&a[..n], &b[..n]);
    let mut acc = [0.0f64; 4];
    let ca = a.chunks_exact(4);
    let cb = b.chunks_exact(4);
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        acc[0] += x[0] * y[0];
        acc[1] += x[1] * y[1];
        acc[2] += x[2] * y[2];
        acc[3] += x[3] * y[3];
    }
    let mut tail = 0.0;
    for (x, y) in ra.iter().zip(rb) {
        tail += x * y;
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// `y += alpha·x`
#[inline]
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn norm2(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

/// `max_i |a_i − b_i|`
pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DenseMatrix {
        let data = (0..rows * cols).map(|_| rng.random_range(-1.0..1.0)).collect();
        DenseMatrix::new(rows, cols, data).unwrap()
    }

    /// Gauss-Jordan inverse with partial pivoting, independent of the Cholesky path.
    fn gauss_jordan_inverse(a: &DenseMatrix) -> DenseMatrix {
        let n = a.rows();
        let mut m: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let mut row: Vec<f64> = (0..n).map(|j| a.get(i, j)).collect();
                row.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
                row
            })
            .collect();
        for col in 0..n {
            let p = (col..n)
                .max_by(|&x, &y| m[x][col].abs().total_cmp(&m[y][col].abs()))
                .unwrap();
            m.swap(col, p);
            let pv = m[col][col];
            for v in m[col].iter_mut() {
                *v /= pv;
            }
            for r in 0..n {
                if r != col {
                    let f = m[r][col];
                    let pivot_row = m[col].clone();
                    for (v, pvv) in m[r].iter_mut().zip(pivot_row) {
                        *v -= f * pvv;
                    }
                }
            }
        }
        let rows: Vec<Vec<f64>> = m.into_iter().map(|r| r[n..].to_vec()).collect();
        DenseMatrix::from_rows(&rows).unwrap()
    }

    #[test]
    fn gram_examples() {
        assert_eq!(DenseMatrix::identity(2).gram(), DenseMatrix::identity(2));
        let x = DenseMatrix::from_rows(&[[1.0], [2.0]]).unwrap();
        assert_eq!(x.gram().as_slice(), &[5.0]);

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = random_matrix(&mut rng, 5, 3).gram();
        for i in 0..3 {
            assert!(g.get(i, i) >= 0.0);
            for j in 0..3 {
                assert_eq!(g.get(i, j), g.get(j, i));
            }
        }
    }

    #[test]
    fn outer_gram_matches_transposed_gram() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let x = random_matrix(&mut rng, 6, 11);
        let a = x.outer_gram();
        let b = x.transpose().gram();
        assert!(max_abs_diff(a.as_slice(), b.as_slice()) < 1e-12);
        for i in 0..6 {
            for j in 0..6 {
                assert_eq!(a.get(i, j), a.get(j, i));
            }
        }
    }

    #[test]
    fn spd_factor_examples() {
        let f = spd_factor(&DenseMatrix::identity(2), 1.0).unwrap();
        assert!(max_abs_diff(&solve_spd(&f, &[4.0, 2.0]).unwrap(), &[2.0, 1.0]) <= 1e-15);

        let zero = DenseMatrix::zeros(2, 2);
        assert!(matches!(
            spd_factor(&zero, 0.0),
            Err(Error::NotPositiveDefinite { .. })
        ));

        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = random_matrix(&mut rng, 4, 3).gram();
        let mut shifted = a.clone();
        for i in 0..3 {
            shifted.set(i, i, a.get(i, i) + 0.5);
        }
        let inv = gauss_jordan_inverse(&shifted);
        let f = spd_factor(&a, 0.5).unwrap();
        for _ in 0..5 {
            let b: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
            let x = solve_spd(&f, &b).unwrap();
            let expected = inv.matvec(&b, false).unwrap();
            let rel = max_abs_diff(&x, &expected) / expected.norm_inf();
            assert!(rel <= 1e-8, "relative error {rel}");
        }
    }

    #[test]
    fn solve_spd_examples() {
        let two = DenseMatrix::identity(2);
        let f = spd_factor(&two, 1.0).unwrap();
        assert!(max_abs_diff(&solve_spd(&f, &[2.0, 4.0]).unwrap(), &[1.0, 2.0]) <= 1e-15);
        let f = spd_factor(&DenseMatrix::identity(2), 0.0).unwrap();
        assert_eq!(solve_spd(&f, &[0.0, 0.0]).unwrap().as_slice(), &[0.0, 0.0]);
        assert!(matches!(
            solve_spd(&f, &[1.0]),
            Err(Error::DimensionMismatch { .. })
        ));

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x = random_matrix(&mut rng, 9, 6);
        let a = x.gram();
        let f = spd_factor(&a, 0.1).unwrap();
        let b: Vec<f64> = (0..6).map(|_| rng.random_range(-1.0..1.0)).collect();
        let sol = solve_spd(&f, &b).unwrap();
        let mut r = a.matvec(&sol, false).unwrap();
        for i in 0..6 {
            r[i] += 0.1 * sol[i] - b[i];
        }
        assert!(r.norm2() <= 1e-10 * norm2(&b));
    }

    #[test]
    fn spd_recovers_solution_for_moderate_condition_numbers() {
        // A = Q diag(1..1e6) Qᵀ with Q from an orthonormalised random matrix.
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let n = 8;
        let mut q = random_matrix(&mut rng, n, n);
        for j in 0..n {
            for k in 0..j {
                let p = dot(q.col(j), q.col(k));
                let ck = q.col(k).to_vec();
                axpy(-p, &ck, q.col_mut(j));
            }
            let nn = norm2(q.col(j));
            q.col_mut(j).iter_mut().for_each(|v| *v /= nn);
        }
        let mut d = DenseMatrix::zeros(n, n);
        for i in 0..n {
            d.set(i, i, 10f64.powf(6.0 * i as f64 / (n - 1) as f64));
        }
        let a = q.matmul(&d).unwrap().matmul(&q.transpose()).unwrap();
        // symmetrise away rounding noise
        let mut sym = a.clone();
        for i in 0..n {
            for j in 0..n {
                sym.set(i, j, 0.5 * (a.get(i, j) + a.get(j, i)));
            }
        }
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let b = sym.matvec(&x, false).unwrap();
        let got = solve_spd(&spd_factor(&sym, 0.0).unwrap(), &b).unwrap();
        let rel = max_abs_diff(&got, &x) / norm2(&x);
        assert!(rel <= 1e-8, "relative error {rel}");
    }

    #[test]
    fn matvec_examples() {
        let id = DenseMatrix::identity(2);
        assert_eq!(id.matvec(&[3.0, 7.0], false).unwrap().as_slice(), &[3.0, 7.0]);
        let x = DenseMatrix::from_rows(&[[1.0, 2.0], [3.0, 4.0]]).unwrap();
        assert_eq!(x.col(0), &[1.0, 3.0]);
        assert_eq!(x.matvec(&[1.0, 1.0], false).unwrap().as_slice(), &[3.0, 7.0]);
        assert_eq!(x.matvec(&[1.0, 0.0], true).unwrap().as_slice(), &[1.0, 2.0]);
        assert!(x.matvec(&[1.0], false).is_err());
    }

    #[test]
    fn matvec_with_basis_vector_is_column() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = random_matrix(&mut rng, 7, 5);
        for i in 0..5 {
            let e = Vector::unit(5, i);
            assert_eq!(x.matvec(&e, false).unwrap().as_slice(), x.col(i));
        }
    }

    #[test]
    fn rejects_non_finite_entries() {
        assert!(DenseMatrix::new(1, 2, vec![1.0, f64::NAN]).is_err());
        assert!(Vector::new(vec![f64::INFINITY]).is_err());
        assert!(DenseMatrix::new(2, 2, vec![1.0]).is_err());
    }
}
