//! Representation-based classification: code a query over the whole training
//! dictionary, then pick the class whose atoms alone reconstruct it best.

mod dataset;
mod persist;

pub use dataset::LabeledDataset;
pub use persist::MODEL_FORMAT_VERSION;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{axpy, norm2, DenseMatrix, Vector};
use crate::preprocess::{l2_normalize_columns, ZERO_NORM};
use crate::solvers::{
    lasso_admm_with, nnls_admm_with, ridge_code_with, CoderKind, CodingResult, DictionaryFactorization,
    SolverConfig,
};

/// A trained classifier: unit-norm dictionary, class partition, coder choice
/// and the pre-stored factorization every query reuses.
#[derive(Debug, Clone)]
pub struct FittedClassifier {
    dictionary: DenseMatrix,
    labels: Vec<usize>,
    class_values: Vec<i64>,
    class_index: Vec<Vec<usize>>,
    coder: CoderKind,
    config: SolverConfig,
    factorization: DictionaryFactorization,
}

/// Outcome of classifying one query.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    /// Canonical class index with the smallest residual (lowest index on ties).
    pub label: usize,
    /// Class-wise reconstruction residuals `‖y − X_k c_k‖₂`.
    pub residuals: Vector,
    pub coefficients: Vector,
}

fn check_coder_config(coder: CoderKind, cfg: &SolverConfig) -> Result<()> {
    cfg.validate()?;
    if coder == CoderKind::Lasso && cfg.lambda <= 0.0 {
        return Err(Error::InvalidConfig("lasso coder needs lambda > 0".into()));
    }
    Ok(())
}

/// Normalises the training columns and pre-stores the factorization.
pub fn fit(data: &LabeledDataset, coder: CoderKind, cfg: SolverConfig) -> Result<FittedClassifier> {
    check_coder_config(coder, &cfg)?;
    if data.dim() == 0 {
        return Err(Error::BadDimension("training samples have zero features".into()));
    }
    if let Some(class) = data.class_index().iter().position(|c| c.is_empty()) {
        return Err(Error::EmptyClass { class });
    }
    if data.is_empty() {
        return Err(Error::EmptyClass { class: 0 });
    }
    let dictionary = l2_normalize_columns(data.features())?;
    FittedClassifier::assemble(
        dictionary,
        data.labels().to_vec(),
        data.class_values().to_vec(),
        coder,
        cfg,
    )
}

impl FittedClassifier {
    fn assemble(
        dictionary: DenseMatrix,
        labels: Vec<usize>,
        class_values: Vec<i64>,
        coder: CoderKind,
        config: SolverConfig,
    ) -> Result<Self> {
        let mut class_index = vec![Vec::new(); class_values.len()];
        for (j, &l) in labels.iter().enumerate() {
            class_index[l].push(j);
        }
        let factorization =
            DictionaryFactorization::with_shift(&dictionary, coder.factorization_shift(&config))?;
        Ok(FittedClassifier {
            dictionary,
            labels,
            class_values,
            class_index,
            coder,
            config,
            factorization,
        })
    }

    pub fn dictionary(&self) -> &DenseMatrix {
        &self.dictionary
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn class_index(&self) -> &[Vec<usize>] {
        &self.class_index
    }

    pub fn class_values(&self) -> &[i64] {
        &self.class_values
    }

    /// Original label value of a canonical class index.
    pub fn class_value(&self, class: usize) -> i64 {
        self.class_values[class]
    }

    pub fn num_classes(&self) -> usize {
        self.class_values.len()
    }

    pub fn dim(&self) -> usize {
        self.dictionary.rows()
    }

    pub fn coder(&self) -> CoderKind {
        self.coder
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn factorization(&self) -> &DictionaryFactorization {
        &self.factorization
    }

    /// Codes `y` over the dictionary with the configured coder. `y` is used
    /// as given; [`FittedClassifier::predict`] normalises first.
    pub fn code(&self, y: &[f64]) -> Result<CodingResult> {
        if y.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                context: "query length",
                expected: self.dim(),
                found: y.len(),
            });
        }
        let x = &self.dictionary;
        let f = &self.factorization;
        match self.coder {
            CoderKind::Nnls => nnls_admm_with(x, f, y, &self.config),
            CoderKind::Ridge => ridge_code_with(x, f, y),
            CoderKind::Lasso => lasso_admm_with(x, f, y, &self.config),
        }
    }

    /// `r_k = ‖y − X_k c_k‖₂` for every class.
    pub fn class_residuals(&self, y: &[f64], c: &[f64]) -> Result<Vector> {
        if c.len() != self.dictionary.cols() {
            return Err(Error::DimensionMismatch {
                context: "coefficient length",
                expected: self.dictionary.cols(),
                found: c.len(),
            });
        }
        if y.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                context: "query length",
                expected: self.dim(),
                found: y.len(),
            });
        }
        let mut scratch = vec![0.0; y.len()];
        Ok(self
            .class_index
            .iter()
            .map(|members| {
                scratch.copy_from_slice(y);
                for &j in members {
                    if c[j] != 0.0 {
                        axpy(-c[j], self.dictionary.col(j), &mut scratch);
                    }
                }
                norm2(&scratch)
            })
            .collect())
    }

    /// Normalises `y`, codes it and returns the minimum-residual class.
    pub fn predict(&self, y: &[f64]) -> Result<Prediction> {
        if y.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                context: "query length",
                expected: self.dim(),
                found: y.len(),
            });
        }
        let norm = norm2(y);
        if norm.is_nan() || norm < ZERO_NORM {
            return Err(Error::ZeroNormQuery);
        }
        let y: Vec<f64> = y.iter().map(|v| v / norm).collect();
        let coding = self.code(&y)?;
        let residuals = self.class_residuals(&y, &coding.coefficients)?;
        let label = argmin_lowest(&residuals);
        Ok(Prediction {
            label,
            residuals,
            coefficients: coding.coefficients,
        })
    }

    /// [`FittedClassifier::predict`] over every column, in column order.
    /// Queries run in parallel; the result equals the sequential map.
    pub fn predict_batch(&self, queries: &DenseMatrix) -> Result<Vec<Prediction>> {
        if queries.cols() > 0 && queries.rows() != self.dim() {
            return Err(Error::DimensionMismatch {
                context: "query batch rows",
                expected: self.dim(),
                found: queries.rows(),
            });
        }
        let results: Vec<Result<Prediction>> = (0..queries.cols())
            .into_par_iter()
            .map(|j| self.predict(queries.col(j)))
            .collect();
        results.into_iter().collect()
    }
}

fn argmin_lowest(values: &[f64]) -> usize {
    let mut best = 0;
    for (k, v) in values.iter().enumerate().skip(1) {
        if *v < values[best] {
            best = k;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_class_identity() -> LabeledDataset {
        LabeledDataset::from_raw_labels(DenseMatrix::identity(4), &[0, 0, 1, 1]).unwrap()
    }

    #[test]
    fn fit_keeps_unit_columns_and_normalises_others() {
        let clf = fit(&two_class_identity(), CoderKind::Nnls, SolverConfig::default()).unwrap();
        assert_eq!(clf.dictionary(), &DenseMatrix::identity(4));

        let x = DenseMatrix::from_columns(&[[3.0, 4.0], [0.0, 1.0]]).unwrap();
        let d = LabeledDataset::from_raw_labels(x, &[0, 1]).unwrap();
        let clf = fit(&d, CoderKind::Ridge, SolverConfig::default().with_lambda(0.1)).unwrap();
        assert_eq!(clf.dictionary().col(0), &[0.6, 0.8]);
        for c in clf.dictionary().columns() {
            assert!((norm2(c) - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn fit_rejects_zero_columns_and_empty_classes() {
        let x = DenseMatrix::from_columns(&[[0.0, 0.0], [1.0, 0.0]]).unwrap();
        let d = LabeledDataset::from_raw_labels(x, &[0, 1]).unwrap();
        assert!(matches!(
            fit(&d, CoderKind::Nnls, SolverConfig::default()),
            Err(Error::ZeroNormSample { column: 0 })
        ));
        let x = DenseMatrix::identity(2);
        let d = LabeledDataset::with_classes(x, &[0, 0], vec![0, 1]).unwrap();
        assert!(matches!(
            fit(&d, CoderKind::Nnls, SolverConfig::default()),
            Err(Error::EmptyClass { class: 1 })
        ));
        let d = two_class_identity();
        assert!(fit(&d, CoderKind::Lasso, SolverConfig::default()).is_err());
    }

    #[test]
    fn code_examples() {
        let clf = fit(&two_class_identity(), CoderKind::Nnls, SolverConfig::accurate()).unwrap();
        let r = clf.code(&[0.0, 0.0, 1.0, 0.0]).unwrap();
        assert_eq!(argmin_lowest(&r.coefficients.scaled(-1.0)), 2);
        assert!((r.coefficients[2] - 1.0).abs() < 1e-6);
        let res = clf.class_residuals(&[0.0, 0.0, 1.0, 0.0], &r.coefficients).unwrap();
        assert!(res[1] < 1e-6);

        let r = clf.code(&[0.0; 4]).unwrap();
        assert_eq!(r.coefficients.as_slice(), &[0.0; 4]);
        assert!(matches!(clf.code(&[1.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn class_residual_examples() {
        let x = DenseMatrix::identity(6);
        let d = LabeledDataset::from_raw_labels(x, &[0, 0, 1, 1, 2, 2]).unwrap();
        let clf = fit(&d, CoderKind::Nnls, SolverConfig::default()).unwrap();
        let y = clf.dictionary().col(4).to_vec();
        let r = clf.class_residuals(&y, &Vector::unit(6, 4)).unwrap();
        assert_eq!(r.as_slice(), &[1.0, 1.0, 0.0]);
        let r = clf.class_residuals(&y, &Vector::zeros(6)).unwrap();
        assert_eq!(r.as_slice(), &[1.0, 1.0, 1.0]);
        assert!(clf.class_residuals(&y, &[0.0; 3]).is_err());

        // identical atoms in both classes, equal weights
        let dup = DenseMatrix::from_columns(&[[0.6, 0.8], [0.6, 0.8]]).unwrap();
        let d = LabeledDataset::from_raw_labels(dup, &[0, 1]).unwrap();
        let clf = fit(&d, CoderKind::Ridge, SolverConfig::default().with_lambda(0.1)).unwrap();
        let r = clf.class_residuals(&[0.6, 0.8], &[0.5, 0.5]).unwrap();
        assert_eq!(r[0], r[1]);
    }

    #[test]
    fn predict_examples() {
        let x = DenseMatrix::from_columns(&[
            [1.0, 0.1, 0.0, 0.0],
            [0.9, 0.0, 0.2, 0.0],
            [0.0, 1.0, 0.0, 0.1],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.1, 0.0, 1.0],
        ])
        .unwrap();
        let d = LabeledDataset::from_raw_labels(x.clone(), &[1, 1, 2, 3, 4]).unwrap();
        let clf = fit(&d, CoderKind::Nnls, SolverConfig::accurate().with_tol(1e-10)).unwrap();
        let p = clf.predict(x.col(3)).unwrap();
        assert_eq!(clf.class_value(p.label), 3);
        assert!(p.residuals[p.label] < 1e-6);
        let scaled: Vec<f64> = x.col(3).iter().map(|v| 5.0 * v).collect();
        assert_eq!(clf.predict(&scaled).unwrap(), p);
        assert!(matches!(clf.predict(&[0.0; 4]), Err(Error::ZeroNormQuery)));
    }

    #[test]
    fn tied_residuals_pick_lowest_class() {
        let dup = DenseMatrix::from_columns(&[[1.0, 0.0], [1.0, 0.0]]).unwrap();
        let d = LabeledDataset::from_raw_labels(dup, &[5, 9]).unwrap();
        let clf = fit(&d, CoderKind::Ridge, SolverConfig::default().with_lambda(0.5)).unwrap();
        // orthogonal query: zero code, both residuals exactly ‖y‖
        let p = clf.predict(&[0.0, 2.0]).unwrap();
        assert_eq!(p.residuals.as_slice(), &[1.0, 1.0]);
        assert_eq!(p.label, 0);
        assert_eq!(clf.class_value(p.label), 5);
    }

    #[test]
    fn batch_edge_cases() {
        let clf = fit(&two_class_identity(), CoderKind::Nnls, SolverConfig::default()).unwrap();
        let empty = DenseMatrix::zeros(4, 0);
        assert!(clf.predict_batch(&empty).unwrap().is_empty());
        let one = DenseMatrix::from_columns(&[[0.1, 0.2, 0.9, 0.3]]).unwrap();
        let batch = clf.predict_batch(&one).unwrap();
        assert_eq!(batch, vec![clf.predict(one.col(0)).unwrap()]);
        let bad = DenseMatrix::zeros(3, 1);
        assert!(clf.predict_batch(&bad).is_err());
    }
}
