use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{ExperimentConfig, ModelBundle};
use crate::classifier::LabeledDataset;
use crate::data_io::stratified_folds;
use crate::error::Result;

/// Mean fold accuracy of one grid value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CvScore {
    pub trial: usize,
    pub value: f64,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvOutcome {
    pub value: f64,
    /// One entry per grid value, in ascending value order. Empty when the
    /// grid has a single value and nothing had to be compared.
    pub scores: Vec<CvScore>,
}

/// Picks the grid value with the best mean k-fold accuracy on `train`, ties
/// going to the smaller value. Folds are stratified and seeded by
/// `(cfg.split.seed, trial)`; PCA, when configured, is refit on every
/// training fold.
pub fn cross_validate(train: &LabeledDataset, cfg: &ExperimentConfig, trial: usize) -> Result<CvOutcome> {
    cfg.validate()?;
    let mut grid = cfg.grid().to_vec();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    if grid.len() == 1 {
        return Ok(CvOutcome {
            value: grid[0],
            scores: Vec::new(),
        });
    }
    let k = cfg.cv_folds;
    let assignment = stratified_folds(train, k, cfg.split.seed, trial)?;
    let splits: Vec<(LabeledDataset, LabeledDataset)> = (0..k)
        .map(|f| {
            let fit_idx: Vec<usize> = (0..train.len()).filter(|&j| assignment[j] != f).collect();
            let held: Vec<usize> = (0..train.len()).filter(|&j| assignment[j] == f).collect();
            (train.subset(&fit_idx), train.subset(&held))
        })
        .collect();

    let jobs: Vec<(usize, usize)> = (0..grid.len()).flat_map(|g| (0..k).map(move |f| (g, f))).collect();
    let fold_acc: Vec<f64> = jobs
        .par_iter()
        .map(|&(g, f)| {
            let (fit_set, held) = &splits[f];
            let model = ModelBundle::fit(fit_set, cfg.coder, cfg.solver_with(grid[g]), cfg.pca_dim)?;
            let preds = model.predict_batch(held.features())?;
            let correct = preds
                .iter()
                .zip(held.labels())
                .filter(|(p, &l)| p.label == l)
                .count();
            Ok(correct as f64 / held.len() as f64)
        })
        .collect::<Result<Vec<f64>>>()?;

    let scores: Vec<CvScore> = grid
        .iter()
        .enumerate()
        .map(|(g, &value)| CvScore {
            trial,
            value,
            accuracy: fold_acc[g * k..(g + 1) * k].iter().sum::<f64>() / k as f64,
        })
        .collect();
    let mut best = scores[0];
    for s in &scores[1..] {
        // strict improvement only, so ties keep the smaller value
        if s.accuracy > best.accuracy {
            best = *s;
        }
    }
    Ok(CvOutcome {
        value: best.value,
        scores,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data_io::SplitSpec;
    use crate::linalg::DenseMatrix;
    use crate::solvers::CoderKind;
    use crate::Error;

    fn cfg(coder: CoderKind) -> ExperimentConfig {
        ExperimentConfig::new(
            "unused",
            coder,
            SplitSpec {
                per_class: 5,
                seed: 3,
                trials: 1,
            },
        )
    }

    /// Two classes on nearly orthogonal axes, five samples each.
    fn separable() -> LabeledDataset {
        let mut cols = Vec::new();
        let mut labels = Vec::new();
        for j in 0..10 {
            let class = j % 2;
            let e = 0.01 * (j as f64 + 1.0);
            cols.push(if class == 0 { vec![1.0, e, 0.0] } else { vec![e, 1.0, 0.0] });
            labels.push(class as i64);
        }
        LabeledDataset::from_raw_labels(DenseMatrix::from_columns(&cols).unwrap(), &labels).unwrap()
    }

    #[test]
    fn single_value_grid_is_returned() {
        let mut c = cfg(CoderKind::Nnls);
        c.rho_grid = vec![0.7];
        let out = cross_validate(&separable(), &c, 0).unwrap();
        assert_eq!(out.value, 0.7);
        assert!(out.scores.is_empty());
    }

    #[test]
    fn separating_value_wins() {
        // λ = 1e3 thresholds every lasso code to zero, so all residuals equal
        // ‖y‖ and each query falls to class 0.
        let mut c = cfg(CoderKind::Lasso);
        c.lambda_grid = vec![1e3, 1e-3];
        let out = cross_validate(&separable(), &c, 0).unwrap();
        assert_eq!(out.value, 1e-3);
        assert_eq!(out.scores[0].accuracy, 1.0);
        assert!(out.scores[1].accuracy < 1.0);
    }

    #[test]
    fn ties_go_to_smaller_value() {
        let mut c = cfg(CoderKind::Nnls);
        c.rho_grid = vec![0.5, 0.1, 1.0];
        let out = cross_validate(&separable(), &c, 0).unwrap();
        assert!(out.scores.iter().all(|s| s.accuracy == 1.0));
        assert_eq!(out.value, 0.1);
    }

    #[test]
    fn too_few_samples_for_folds() {
        let mut c = cfg(CoderKind::Nnls);
        c.cv_folds = 6;
        assert!(matches!(
            cross_validate(&separable(), &c, 0),
            Err(Error::ClassTooSmall { available: 5, required: 6, .. })
        ));
    }
}
