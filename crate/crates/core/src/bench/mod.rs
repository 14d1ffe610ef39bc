//! Experiment harness: hyperparameter cross-validation, multi-trial accuracy
//! runs, per-query timing and report emission.

mod bundle;
mod cv;
mod experiment;
mod report;
mod timing;

pub use bundle::{ModelBundle, BUNDLE_FORMAT_VERSION};
pub use cv::{cross_validate, CvOutcome, CvScore};
pub use experiment::{run_experiment, run_experiment_on, ExperimentData};
pub use report::{
    emit_report, parse_csv_trials, parse_report, read_report, render_report, summarize, ExperimentReport,
    ReportFormat, TrialRecord,
};
pub use timing::{time_query, TimingStats};

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::data_io::SplitSpec;
use crate::error::{Error, Result};
use crate::solvers::{CoderKind, SolverConfig};

/// Default ρ grid searched for the NNLS coder.
pub const DEFAULT_RHO_GRID: [f64; 8] = [1e-3, 1e-2, 5e-2, 0.1, 0.5, 1.0, 5.0, 10.0];
/// Default λ grid searched for the ridge and lasso coders.
pub const DEFAULT_LAMBDA_GRID: [f64; 5] = [1e-4, 1e-3, 1e-2, 1e-1, 1.0];

fn default_folds() -> usize {
    5
}

fn default_rho_grid() -> Vec<f64> {
    DEFAULT_RHO_GRID.to_vec()
}

fn default_lambda_grid() -> Vec<f64> {
    DEFAULT_LAMBDA_GRID.to_vec()
}

/// Everything that defines one experiment. Serialised as TOML:
///
/// ```toml
/// dataset = "usps.toml"      # dataset manifest, relative to this file
/// coder = "nnls"             # nnls | ridge | lasso
/// cv_folds = 5
/// rho_grid = [0.01, 0.1, 1.0]
/// pca_dim = 100              # optional
///
/// [solver]
/// max_iters = 5
///
/// [split]
/// per_class = 300
/// seed = 2018
/// trials = 10
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Path of the dataset manifest.
    pub dataset: PathBuf,
    pub coder: CoderKind,
    /// Solver settings; the cross-validated parameter overrides its field.
    #[serde(default)]
    pub solver: SolverConfig,
    pub split: SplitSpec,
    #[serde(default = "default_folds")]
    pub cv_folds: usize,
    /// Cross-validate on every trial instead of only on trial 0.
    #[serde(default)]
    pub cv_per_trial: bool,
    /// Candidate ρ values, searched for the NNLS coder.
    #[serde(default = "default_rho_grid")]
    pub rho_grid: Vec<f64>,
    /// Candidate λ values, searched for the ridge and lasso coders.
    #[serde(default = "default_lambda_grid")]
    pub lambda_grid: Vec<f64>,
    /// Project onto this many principal components before coding.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pca_dim: Option<usize>,
    /// Number of held-out queries timed on trial 0; 0 disables timing, which
    /// keeps the report fully deterministic.
    #[serde(default)]
    pub timing_queries: usize,
}

/// The hyperparameter a coder's cross-validation searches over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tuned {
    Rho,
    Lambda,
}

impl Tuned {
    pub fn for_coder(coder: CoderKind) -> Self {
        match coder {
            CoderKind::Nnls => Tuned::Rho,
            CoderKind::Ridge | CoderKind::Lasso => Tuned::Lambda,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Tuned::Rho => "rho",
            Tuned::Lambda => "lambda",
        }
    }
}

impl ExperimentConfig {
    /// A config with default solver, folds and grids.
    pub fn new(dataset: impl Into<PathBuf>, coder: CoderKind, split: SplitSpec) -> Self {
        ExperimentConfig {
            dataset: dataset.into(),
            coder,
            solver: SolverConfig::default(),
            split,
            cv_folds: default_folds(),
            cv_per_trial: false,
            rho_grid: default_rho_grid(),
            lambda_grid: default_lambda_grid(),
            pca_dim: None,
            timing_queries: 0,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| Error::InvalidConfig(format!("experiment config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Loads a TOML config; a relative `dataset` path is resolved against the
    /// config file's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::parse(&text)?;
        if cfg.dataset.is_relative() {
            if let Some(dir) = path.parent() {
                cfg.dataset = dir.join(&cfg.dataset);
            }
        }
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("experiment config is always representable in TOML")
    }

    pub fn tuned(&self) -> Tuned {
        Tuned::for_coder(self.coder)
    }

    /// The grid searched for this config's coder.
    pub fn grid(&self) -> &[f64] {
        match self.tuned() {
            Tuned::Rho => &self.rho_grid,
            Tuned::Lambda => &self.lambda_grid,
        }
    }

    /// Solver settings with the tuned parameter set to `value`.
    pub fn solver_with(&self, value: f64) -> SolverConfig {
        match self.tuned() {
            Tuned::Rho => self.solver.with_rho(value),
            Tuned::Lambda => self.solver.with_lambda(value),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.solver.validate()?;
        self.split.validate()?;
        if self.cv_folds < 2 {
            return Err(Error::InvalidConfig("cv_folds must be >= 2".into()));
        }
        for (name, grid) in [("rho_grid", &self.rho_grid), ("lambda_grid", &self.lambda_grid)] {
            if grid.is_empty() {
                return Err(Error::InvalidConfig(format!("{name} must not be empty")));
            }
            if let Some(v) = grid.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
                return Err(Error::InvalidConfig(format!("{name} values must be positive, got {v}")));
            }
        }
        if self.pca_dim == Some(0) {
            return Err(Error::InvalidConfig("pca_dim must be >= 1".into()));
        }
        Ok(())
    }
}
