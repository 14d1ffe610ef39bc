use super::{CodingResult, DictionaryFactorization};
use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, Vector};

/// Collaborative representation: `c = (XᵀX + λI)⁻¹ Xᵀy`.
pub fn ridge_code(x: &DenseMatrix, y: &[f64], lambda: f64) -> Result<Vector> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidConfig(format!("lambda must be >= 0, got {lambda}")));
    }
    let fact = DictionaryFactorization::with_shift(x, lambda)?;
    Ok(ridge_code_with(x, &fact, y)?.coefficients)
}

/// Ridge coding against a factorization of `XᵀX + λI` built once per dictionary.
pub fn ridge_code_with(
    x: &DenseMatrix,
    fact: &DictionaryFactorization,
    y: &[f64],
) -> Result<CodingResult> {
    if y.len() != x.rows() {
        return Err(Error::DimensionMismatch {
            context: "query length",
            expected: x.rows(),
            found: y.len(),
        });
    }
    let xty = x.matvec(y, true)?;
    Ok(CodingResult::closed_form(fact.apply(&xty)?))
}
