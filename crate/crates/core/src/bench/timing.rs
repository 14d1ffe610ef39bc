use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::classifier::FittedClassifier;
use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

/// Per-query wall-clock statistics, in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimingStats {
    pub queries: usize,
    pub mean_seconds: f64,
    pub median_seconds: f64,
}

/// Times `predict` (coding plus the residual rule) on each query in turn, on
/// the calling thread. The factorization is already stored in `clf`, so fit
/// time is excluded. The first query is run once untimed as a warm-up.
pub fn time_query(clf: &FittedClassifier, queries: &DenseMatrix) -> Result<TimingStats> {
    if queries.cols() == 0 {
        return Err(Error::InvalidConfig("timing needs at least one query".into()));
    }
    clf.predict(queries.col(0))?;
    let mut secs = Vec::with_capacity(queries.cols());
    for q in queries.columns() {
        let start = Instant::now();
        let p = clf.predict(q)?;
        secs.push(start.elapsed().as_secs_f64());
        std::hint::black_box(p);
    }
    Ok(stats(&secs))
}

fn stats(secs: &[f64]) -> TimingStats {
    let mean = secs.iter().sum::<f64>() / secs.len() as f64;
    let mut sorted = secs.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    };
    TimingStats {
        queries: n,
        mean_seconds: mean,
        median_seconds: median,
    }
}
