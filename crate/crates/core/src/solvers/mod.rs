//! Representation coders.
//!
//! * [`nnls_admm`]: non-negative least squares by ADMM, the coder behind NRC.
//! * [`ridge_code`]: closed-form ℓ2-regularised coding (CRC).
//! * [`lasso_admm`]: ℓ1-regularised coding by ADMM (SRC).
//! * [`nnls_oracle`]: exhaustive support enumeration, used to check the others.
//!
//! All three production coders solve their linear systems through a
//! [`DictionaryFactorization`], which is built once per dictionary and shared
//! read-only by every query.

mod admm;
mod factorization;
mod oracle;
mod ridge;

pub use admm::{
    admm_c_update, admm_dual_update, admm_z_update, lasso_admm, lasso_admm_with, nnls_admm,
    nnls_admm_with, soft_threshold,
};
pub use factorization::{build_factorization, DictionaryFactorization, GramInverseOperator};
pub use oracle::{nnls_kkt, nnls_oracle, residual_norm, KktReport, ORACLE_MAX_COLUMNS};
pub use ridge::{ridge_code, ridge_code_with};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Vector;

/// Iteration budget used when the solver is run to full accuracy rather than
/// as a fixed-budget classifier coder.
pub const ACCURATE_MAX_ITERS: usize = 5000;

/// Hyperparameters shared by the coders.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// ADMM penalty ρ.
    pub rho: f64,
    /// Iteration cap T.
    pub max_iters: usize,
    /// Convergence tolerance on the ∞-norm of the three ADMM residuals.
    pub tol: f64,
    /// Regularisation weight λ for the ridge and lasso coders.
    pub lambda: f64,
}

impl Default for SolverConfig {
    /// Classification defaults: ρ = 1, T = 5, Tol = 1e-6.
    fn default() -> Self {
        SolverConfig {
            rho: 1.0,
            max_iters: 5,
            tol: 1e-6,
            lambda: 0.0,
        }
    }
}

impl SolverConfig {
    /// Defaults with a 5000-iteration budget, for solving to accuracy.
    pub fn accurate() -> Self {
        SolverConfig {
            max_iters: ACCURATE_MAX_ITERS,
            ..Self::default()
        }
    }

    pub fn with_rho(mut self, rho: f64) -> Self {
        self.rho = rho;
        self
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rho > 0.0 && self.rho.is_finite()) {
            return Err(Error::InvalidConfig(format!("rho must be > 0, got {}", self.rho)));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidConfig("max_iters must be >= 1".into()));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidConfig(format!("tol must be > 0, got {}", self.tol)));
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "lambda must be >= 0, got {}",
                self.lambda
            )));
        }
        Ok(())
    }
}

/// Which representation model codes the queries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoderKind {
    /// Non-negative representation (NRC).
    Nnls,
    /// Collaborative, ℓ2-regularised representation (CRC).
    Ridge,
    /// Sparse, ℓ1-regularised representation (SRC).
    Lasso,
}

impl CoderKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CoderKind::Nnls => "nnls",
            CoderKind::Ridge => "ridge",
            CoderKind::Lasso => "lasso",
        }
    }

    /// The diagonal shift of `XᵀX` whose inverse this coder applies.
    pub fn factorization_shift(self, cfg: &SolverConfig) -> f64 {
        match self {
            CoderKind::Nnls | CoderKind::Lasso => cfg.rho / 2.0,
            CoderKind::Ridge => cfg.lambda,
        }
    }
}

impl std::str::FromStr for CoderKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "nnls" | "nrc" => Ok(CoderKind::Nnls),
            "ridge" | "crc" => Ok(CoderKind::Ridge),
            "lasso" | "src" => Ok(CoderKind::Lasso),
            other => Err(Error::InvalidConfig(format!("unknown coder {other:?}"))),
        }
    }
}

impl std::fmt::Display for CoderKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Variables of the ADMM iteration: primal `c`, split copy `z` and multiplier `delta`.
#[derive(Debug, Clone, PartialEq)]
pub struct AdmmState {
    pub c: Vector,
    pub z: Vector,
    pub delta: Vector,
    pub iter: usize,
}

impl AdmmState {
    pub fn zeros(n: usize) -> Self {
        AdmmState {
            c: Vector::zeros(n),
            z: Vector::zeros(n),
            delta: Vector::zeros(n),
            iter: 0,
        }
    }
}

/// One iteration's convergence quantities, all ∞-norms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRecord {
    /// `max |c_{t+1} − z_{t+1}|`
    pub primal_gap: f64,
    /// `max |c_{t+1} − c_t|`
    pub c_change: f64,
    /// `max |z_{t+1} − z_t|`
    pub z_change: f64,
}

impl ConvergenceRecord {
    pub fn max(&self) -> f64 {
        self.primal_gap.max(self.c_change).max(self.z_change)
    }

    pub fn within(&self, tol: f64) -> bool {
        self.primal_gap <= tol && self.c_change <= tol && self.z_change <= tol
    }
}

/// Output of a coder.
#[derive(Debug, Clone, PartialEq)]
pub struct CodingResult {
    /// The coding vector. For ADMM coders this is the split variable `z`
    /// (non-negative for NNLS); for ridge it is the closed-form solution.
    pub coefficients: Vector,
    pub iterations: usize,
    pub converged: bool,
    pub history: Vec<ConvergenceRecord>,
    /// Final ADMM variables; `None` for closed-form coders.
    pub state: Option<AdmmState>,
}

impl CodingResult {
    pub(crate) fn closed_form(coefficients: Vector) -> Self {
        CodingResult {
            coefficients,
            iterations: 0,
            converged: true,
            history: Vec::new(),
            state: None,
        }
    }
}
