use crate::error::{Error, Result};
use crate::linalg::{axpy, spd_factor, DenseMatrix, SpdFactor, Vector};

/// Applies `(XᵀX + s·I)⁻¹` through the Woodbury identity
///
/// ```text
/// (XᵀX + s·I)⁻¹ = (1/s)·I − (1/s)²·Xᵀ (I + (1/s)·XXᵀ)⁻¹ X
/// ```
///
/// so only a `D × D` system is factored. With `s = ρ/2` this is the
/// `(2/ρ)I − (2/ρ)² Xᵀ(I + (2/ρ)XXᵀ)⁻¹X` form of the ADMM c-update.
#[derive(Debug, Clone)]
pub struct GramInverseOperator {
    dictionary: DenseMatrix,
    shift: f64,
    inner: SpdFactor,
}

impl GramInverseOperator {
    pub fn new(x: &DenseMatrix, shift: f64) -> Result<Self> {
        if !(shift > 0.0 && shift.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "Woodbury form needs a positive shift, got {shift}"
            )));
        }
        let inv = 1.0 / shift;
        let mut m = x.outer_gram();
        let d = m.rows();
        for a in 0..d {
            for b in 0..d {
                m.set(a, b, inv * m.get(a, b));
            }
        }
        let inner = spd_factor(&m, 1.0)?;
        Ok(GramInverseOperator {
            dictionary: x.clone(),
            shift,
            inner,
        })
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn apply(&self, v: &[f64]) -> Result<Vector> {
        let inv = 1.0 / self.shift;
        let mut u = self.dictionary.matvec(v, false)?.into_inner();
        self.inner.solve_in_place(&mut u)?;
        let w = self.dictionary.matvec(&u, true)?;
        let mut out: Vector = v.iter().map(|vi| inv * vi).collect();
        axpy(-inv * inv, &w, &mut out);
        Ok(out)
    }
}

/// Pre-stored inverse of `XᵀX + s·I` for a fixed dictionary and shift.
#[derive(Debug, Clone)]
pub enum DictionaryFactorization {
    /// Cholesky factor of the `N × N` system; used when `N ≤ D`.
    Direct { factor: SpdFactor, shift: f64 },
    /// Woodbury form with a `D × D` factor; used when `N > D`.
    Woodbury(GramInverseOperator),
}

impl DictionaryFactorization {
    /// Picks the cheaper path for the shape of `x`: direct when `N ≤ D`,
    /// Woodbury when `N > D`. A zero shift always takes the direct path.
    pub fn with_shift(x: &DenseMatrix, shift: f64) -> Result<Self> {
        if x.cols() > x.rows() && shift > 0.0 {
            Self::woodbury(x, shift)
        } else {
            Self::direct(x, shift)
        }
    }

    pub fn direct(x: &DenseMatrix, shift: f64) -> Result<Self> {
        let factor = spd_factor(&x.gram(), shift)?;
        Ok(DictionaryFactorization::Direct { factor, shift })
    }

    pub fn woodbury(x: &DenseMatrix, shift: f64) -> Result<Self> {
        Ok(DictionaryFactorization::Woodbury(GramInverseOperator::new(x, shift)?))
    }

    pub fn is_woodbury(&self) -> bool {
        matches!(self, DictionaryFactorization::Woodbury(_))
    }

    pub fn shift(&self) -> f64 {
        match self {
            DictionaryFactorization::Direct { shift, .. } => *shift,
            DictionaryFactorization::Woodbury(op) => op.shift(),
        }
    }

    /// Number of dictionary atoms N.
    pub fn dimension(&self) -> usize {
        match self {
            DictionaryFactorization::Direct { factor, .. } => factor.dimension(),
            DictionaryFactorization::Woodbury(op) => op.dictionary.cols(),
        }
    }

    /// `(XᵀX + s·I)⁻¹ · v`
    pub fn apply(&self, v: &[f64]) -> Result<Vector> {
        if v.len() != self.dimension() {
            return Err(Error::DimensionMismatch {
                context: "factorization apply",
                expected: self.dimension(),
                found: v.len(),
            });
        }
        match self {
            DictionaryFactorization::Direct { factor, .. } => {
                let mut x = v.to_vec();
                factor.solve_in_place(&mut x)?;
                Ok(Vector::from(x))
            }
            DictionaryFactorization::Woodbury(op) => op.apply(v),
        }
    }
}

/// Factorization for the NNLS c-update, `(XᵀX + (ρ/2)·I)⁻¹`.
pub fn build_factorization(x: &DenseMatrix, rho: f64) -> Result<DictionaryFactorization> {
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::InvalidConfig(format!("rho must be > 0, got {rho}")));
    }
    DictionaryFactorization::with_shift(x, rho / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DenseMatrix {
        let data = (0..rows * cols).map(|_| rng.random_range(-1.0..1.0)).collect();
        DenseMatrix::new(rows, cols, data).unwrap()
    }

    #[test]
    fn path_selection_follows_shape() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let tall = random_matrix(&mut rng, 10, 3);
        assert!(!build_factorization(&tall, 1.0).unwrap().is_woodbury());
        let wide = random_matrix(&mut rng, 3, 10);
        assert!(build_factorization(&wide, 1.0).unwrap().is_woodbury());
        let square = random_matrix(&mut rng, 4, 4);
        assert!(!build_factorization(&square, 1.0).unwrap().is_woodbury());
    }

    #[test]
    fn woodbury_and_direct_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let x = random_matrix(&mut rng, 5, 8);
        let direct = DictionaryFactorization::direct(&x, 0.5).unwrap();
        let wood = DictionaryFactorization::woodbury(&x, 0.5).unwrap();
        for _ in 0..10 {
            let v: Vec<f64> = (0..8).map(|_| rng.random_range(-1.0..1.0)).collect();
            let a = direct.apply(&v).unwrap();
            let b = wood.apply(&v).unwrap();
            let rel = max_abs_diff(&a, &b) / a.norm_inf();
            assert!(rel <= 1e-8, "relative deviation {rel}");
        }
    }

    #[test]
    fn rejects_bad_rho_and_dimension() {
        let x = DenseMatrix::identity(2);
        assert!(build_factorization(&x, 0.0).is_err());
        assert!(build_factorization(&x, -1.0).is_err());
        let f = build_factorization(&x, 1.0).unwrap();
        assert!(matches!(
            f.apply(&[1.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn zero_shift_uses_direct_path_and_detects_rank_deficiency() {
        let x = DenseMatrix::from_rows(&[[1.0, 1.0, 0.0], [0.0, 0.0, 1.0]]).unwrap();
        assert!(matches!(
            DictionaryFactorization::with_shift(&x, 0.0),
            Err(Error::NotPositiveDefinite { .. })
        ));
    }
}
