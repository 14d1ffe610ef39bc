use rayon::prelude::*;

use super::{cross_validate, time_query, CvScore, ExperimentConfig, ExperimentReport, ModelBundle, TrialRecord};
use crate::classifier::LabeledDataset;
use crate::data_io::{stratified_sample, DatasetManifest, RawDataset};
use crate::error::{Error, Result};

/// The samples an experiment draws from.
#[derive(Debug, Clone)]
pub struct ExperimentData {
    pub name: String,
    /// Pool the training samples are drawn from.
    pub train: RawDataset,
    /// Fixed test set. When absent, each trial tests on the samples of
    /// `train` that were not drawn.
    pub test: Option<RawDataset>,
}

impl ExperimentData {
    pub fn from_manifest(m: &DatasetManifest) -> Result<Self> {
        Ok(ExperimentData {
            name: m.name.clone(),
            train: m.read_train()?,
            test: m.read_test()?,
        })
    }

    pub fn provenance(&self) -> Vec<String> {
        let mut p = vec![self.name.clone(), self.train.source().to_string()];
        if let Some(t) = &self.test {
            p.push(t.source().to_string());
        }
        p
    }
}

/// Loads the manifest named in `cfg` and runs the experiment on it.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let manifest = DatasetManifest::load(&cfg.dataset)?;
    run_experiment_on(cfg, &ExperimentData::from_manifest(&manifest)?)
}

struct Split {
    train: LabeledDataset,
    test: LabeledDataset,
}

fn split(cfg: &ExperimentConfig, data: &ExperimentData, trial: usize) -> Result<Split> {
    let (train, rest) = stratified_sample(&data.train, &cfg.split, trial)?;
    let test = match &data.test {
        Some(t) => t.to_labeled_with(train.class_values())?,
        None => rest,
    };
    if test.is_empty() {
        return Err(Error::format("experiment", "no held-out samples to test on"));
    }
    Ok(Split { train, test })
}

struct TrialOutcome {
    record: TrialRecord,
    cv_scores: Vec<CvScore>,
}

fn run_trial(cfg: &ExperimentConfig, data: &ExperimentData, trial: usize, fixed: Option<f64>) -> Result<TrialOutcome> {
    let s = split(cfg, data, trial)?;
    let (value, cv_scores) = match fixed {
        Some(v) => (v, Vec::new()),
        None => {
            let out = cross_validate(&s.train, cfg, trial)?;
            (out.value, out.scores)
        }
    };
    let solver = cfg.solver_with(value);
    let model = ModelBundle::fit(&s.train, cfg.coder, solver, cfg.pca_dim)?;
    let preds = model.predict_batch(s.test.features())?;
    let correct = preds
        .iter()
        .zip(s.test.labels())
        .filter(|(p, &l)| p.label == l)
        .count();
    Ok(TrialOutcome {
        record: TrialRecord {
            trial,
            rho: solver.rho,
            lambda: solver.lambda,
            cv_run: fixed.is_none(),
            correct,
            tested: s.test.len(),
            accuracy: correct as f64 / s.test.len() as f64,
        },
        cv_scores,
    })
}

/// Runs every trial: stratified draw, optional PCA on the training draw,
/// fit, then classification of the held-out samples.
///
/// The tuned hyperparameter (ρ for NNLS, λ otherwise) is cross-validated on
/// trial 0's training draw and reused, unless `cfg.cv_per_trial` is set.
/// Trials run in parallel; results are collected in trial order, so the
/// report equals the sequential one exactly.
pub fn run_experiment_on(cfg: &ExperimentConfig, data: &ExperimentData) -> Result<ExperimentReport> {
    cfg.validate()?;
    let with_trial = |trial: usize| move |e: Error| Error::Trial {
        trial,
        source: Box::new(e),
    };

    let first = run_trial(cfg, data, 0, None).map_err(with_trial(0))?;
    let fixed = if cfg.cv_per_trial {
        None
    } else {
        Some(match cfg.tuned() {
            super::Tuned::Rho => first.record.rho,
            super::Tuned::Lambda => first.record.lambda,
        })
    };
    let rest: Vec<TrialOutcome> = (1..cfg.split.trials)
        .into_par_iter()
        .map(|t| run_trial(cfg, data, t, fixed).map_err(with_trial(t)))
        .collect::<Result<_>>()?;

    let mut trials = Vec::with_capacity(cfg.split.trials);
    let mut cv_scores = Vec::new();
    for o in std::iter::once(first).chain(rest) {
        trials.push(o.record);
        cv_scores.extend(o.cv_scores);
    }

    let timing = if cfg.timing_queries > 0 {
        let s = split(cfg, data, 0).map_err(with_trial(0))?;
        let t0 = &trials[0];
        let solver = cfg.solver.with_rho(t0.rho).with_lambda(t0.lambda);
        let model = ModelBundle::fit(&s.train, cfg.coder, solver, cfg.pca_dim).map_err(with_trial(0))?;
        let n = cfg.timing_queries.min(s.test.len());
        let idx: Vec<usize> = (0..n).collect();
        let queries = model.project(s.test.subset(&idx).features())?;
        Some(time_query(model.classifier(), &queries)?)
    } else {
        None
    };

    Ok(ExperimentReport::new(cfg.clone(), data.provenance(), trials, cv_scores, timing))
}
