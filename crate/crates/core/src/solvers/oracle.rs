//! Exact NNLS by exhaustive enumeration of supports. Exponential in N; only
//! meant as a reference for testing the iterative coders.

use crate::error::{Error, Result};
use crate::linalg::{dot, norm2, spd_factor, DenseMatrix, Vector};

pub const ORACLE_MAX_COLUMNS: usize = 20;

/// Relative slack under which two residuals count as tied.
const TIE_SLACK: f64 = 1e-12;

/// Exact minimiser of `‖y − Xc‖²` over `c ≥ 0`.
///
/// Every support `S` is tried, smallest first and lexicographically within a
/// size; the unconstrained least-squares fit on `S` is kept when all its
/// coefficients are non-negative. The candidate with the smallest residual
/// wins, the earliest one on ties. Supports whose columns are linearly
/// dependent are skipped: any residual they reach is also reached by an
/// independent sub-support.
pub fn nnls_oracle(x: &DenseMatrix, y: &[f64]) -> Result<Vector> {
    let n = x.cols();
    if n > ORACLE_MAX_COLUMNS {
        return Err(Error::TooManyColumns {
            cols: n,
            max: ORACLE_MAX_COLUMNS,
        });
    }
    if y.len() != x.rows() {
        return Err(Error::DimensionMismatch {
            context: "query length",
            expected: x.rows(),
            found: y.len(),
        });
    }
    let gram = x.gram();
    let xty = x.matvec(y, true)?;
    let yty = dot(y, y);

    let mut best = Vector::zeros(n);
    let mut best_resid = yty;
    let mut support: Vec<usize> = Vec::with_capacity(n);
    for size in 1..=n.min(x.rows()) {
        support.clear();
        support.extend(0..size);
        loop {
            if let Some((coef, resid)) = restricted_fit(&gram, &xty, yty, &support) {
                if resid < best_resid - TIE_SLACK * (1.0 + best_resid) {
                    best_resid = resid;
                    best = Vector::zeros(n);
                    for (&j, v) in support.iter().zip(coef) {
                        best[j] = v;
                    }
                }
            }
            if !next_combination(&mut support, n) {
                break;
            }
        }
    }
    Ok(best)
}

/// Least squares on the columns in `support`; `None` when the restricted
/// Gram matrix is singular or the fit has a negative coefficient.
fn restricted_fit(
    gram: &DenseMatrix,
    xty: &[f64],
    yty: f64,
    support: &[usize],
) -> Option<(Vec<f64>, f64)> {
    let k = support.len();
    let mut sub = DenseMatrix::zeros(k, k);
    for (a, &i) in support.iter().enumerate() {
        for (b, &j) in support.iter().enumerate() {
            sub.set(a, b, gram.get(i, j));
        }
    }
    let rhs: Vec<f64> = support.iter().map(|&j| xty[j]).collect();
    let factor = spd_factor(&sub, 0.0).ok()?;
    let mut coef = rhs.clone();
    factor.solve_in_place(&mut coef).ok()?;
    if coef.iter().any(|v| *v < 0.0) {
        return None;
    }
    // ‖y − X_S c‖² = yᵀy − 2cᵀX_Sᵀy + cᵀ(X_SᵀX_S)c, and at the LS optimum the
    // last two terms combine to −cᵀX_Sᵀy
    let resid = (yty - dot(&coef, &rhs)).max(0.0);
    Some((coef, resid))
}

/// Advances `comb` to the next k-subset of `0..n` in lexicographic order.
fn next_combination(comb: &mut [usize], n: usize) -> bool {
    let k = comb.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if comb[i] < n - k + i {
            comb[i] += 1;
            for j in i + 1..k {
                comb[j] = comb[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// First-order optimality measures of an NNLS candidate, with `g = 2Xᵀ(Xc − y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KktReport {
    /// Most negative gradient entry over coordinates with `cᵢ ≤ 1e-8` (0 if none).
    pub min_gradient_on_zero_set: f64,
    /// Largest `|gᵢ|` over coordinates with `cᵢ > 1e-6` (0 if none).
    pub max_gradient_on_support: f64,
    /// Most negative coefficient (0 if all non-negative).
    pub min_coefficient: f64,
}

impl KktReport {
    pub fn holds(&self, tol: f64) -> bool {
        self.min_gradient_on_zero_set >= -tol
            && self.max_gradient_on_support <= tol
            && self.min_coefficient >= 0.0
    }
}

pub fn nnls_kkt(x: &DenseMatrix, y: &[f64], c: &[f64]) -> Result<KktReport> {
    let mut r = x.matvec(c, false)?;
    if r.len() != y.len() {
        return Err(Error::DimensionMismatch {
            context: "query length",
            expected: r.len(),
            found: y.len(),
        });
    }
    for (ri, yi) in r.iter_mut().zip(y) {
        *ri -= yi;
    }
    let g = x.matvec(&r, true)?;
    let mut report = KktReport {
        min_gradient_on_zero_set: 0.0,
        max_gradient_on_support: 0.0,
        min_coefficient: 0.0,
    };
    for (&ci, gi) in c.iter().zip(g.iter().map(|v| 2.0 * v)) {
        if ci <= 1e-8 {
            report.min_gradient_on_zero_set = report.min_gradient_on_zero_set.min(gi);
        }
        if ci > 1e-6 {
            report.max_gradient_on_support = report.max_gradient_on_support.max(gi.abs());
        }
        report.min_coefficient = report.min_coefficient.min(ci);
    }
    Ok(report)
}

/// `‖y − Xc‖₂`
pub fn residual_norm(x: &DenseMatrix, y: &[f64], c: &[f64]) -> Result<f64> {
    let mut r = x.matvec(c, false)?;
    for (ri, yi) in r.iter_mut().zip(y) {
        *ri -= yi;
    }
    Ok(norm2(&r))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracle_examples() {
        let id = DenseMatrix::identity(2);
        assert_eq!(nnls_oracle(&id, &[1.0, -1.0]).unwrap().as_slice(), &[1.0, 0.0]);

        let dup = DenseMatrix::from_columns(&[[0.6, 0.8], [0.6, 0.8], [1.0, 0.0]]).unwrap();
        let c = nnls_oracle(&dup, &[0.6, 0.8]).unwrap();
        assert!(residual_norm(&dup, &[0.6, 0.8], &c).unwrap() < 1e-12);
        // smallest support, lexicographically first
        assert_eq!(c.as_slice(), &[1.0, 0.0, 0.0]);

        let skew = DenseMatrix::from_columns(&[[0.8, 0.6], [0.6, 0.8]]).unwrap();
        let c = nnls_oracle(&skew, &[1.0, 0.0]).unwrap();
        assert!((c[0] - 0.8).abs() < 1e-15 && c[1] == 0.0);
    }

    #[test]
    fn oracle_limits_columns() {
        let wide = DenseMatrix::zeros(2, 21);
        assert!(matches!(
            nnls_oracle(&wide, &[0.0, 0.0]),
            Err(Error::TooManyColumns { cols: 21, .. })
        ));
    }

    #[test]
    fn all_negative_correlations_give_zero() {
        let x = DenseMatrix::from_columns(&[[1.0, 0.0], [0.0, 1.0]]).unwrap();
        assert_eq!(nnls_oracle(&x, &[-1.0, -2.0]).unwrap().as_slice(), &[0.0, 0.0]);
    }

    #[test]
    fn combinations_are_lexicographic() {
        let mut c = vec![0, 1];
        let mut seen = vec![c.clone()];
        while next_combination(&mut c, 4) {
            seen.push(c.clone());
        }
        assert_eq!(
            seen,
            vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]
        );
    }

    #[test]
    fn kkt_detects_violations() {
        let id = DenseMatrix::identity(2);
        assert!(nnls_kkt(&id, &[1.0, -1.0], &[1.0, 0.0]).unwrap().holds(1e-12));
        assert!(!nnls_kkt(&id, &[1.0, 1.0], &[1.0, 0.0]).unwrap().holds(1e-4));
        assert!(!nnls_kkt(&id, &[0.5, 0.0], &[1.0, 0.0]).unwrap().holds(1e-4));
    }
}
