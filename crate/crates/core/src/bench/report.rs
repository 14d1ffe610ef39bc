use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{CvScore, ExperimentConfig, TimingStats};
use crate::error::{Error, Result};

/// Outcome of one trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    /// ρ and λ actually used (one of them is the cross-validated value).
    pub rho: f64,
    pub lambda: f64,
    /// Whether cross-validation was run on this trial's training split.
    pub cv_run: bool,
    pub correct: usize,
    pub tested: usize,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    /// Dataset name and the files it was read from.
    pub provenance: Vec<String>,
    pub trials: Vec<TrialRecord>,
    pub cv_scores: Vec<CvScore>,
    pub mean_accuracy: f64,
    /// Sample standard deviation (n − 1 denominator; 0 for a single trial).
    pub stddev_accuracy: f64,
    pub timing: Option<TimingStats>,
}

impl ExperimentReport {
    /// Builds a report, computing the summary statistics from `trials`.
    pub fn new(
        config: ExperimentConfig,
        provenance: Vec<String>,
        trials: Vec<TrialRecord>,
        cv_scores: Vec<CvScore>,
        timing: Option<TimingStats>,
    ) -> Self {
        let acc: Vec<f64> = trials.iter().map(|t| t.accuracy).collect();
        let (mean_accuracy, stddev_accuracy) = mean_and_stddev(&acc);
        ExperimentReport {
            config,
            provenance,
            trials,
            cv_scores,
            mean_accuracy,
            stddev_accuracy,
            timing,
        }
    }
}

fn mean_and_stddev(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() == 1 {
        return (mean, 0.0);
    }
    let ss = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>();
    (mean, (ss / (n - 1.0)).sqrt())
}

/// Output encoding of [`emit_report`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReportFormat {
    /// One JSON object per line: a `config` record, one `cv` record per grid
    /// score, one `trial` record per trial and a closing `summary` record.
    JsonLines,
    /// Trial rows only, with a header.
    Csv,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json-lines" | "jsonl" | "json" => Ok(ReportFormat::JsonLines),
            "csv" => Ok(ReportFormat::Csv),
            _ => Err(Error::InvalidConfig(format!("unknown report format {s:?}"))),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "lowercase", deny_unknown_fields)]
enum Line {
    Config {
        config: ExperimentConfig,
        provenance: Vec<String>,
    },
    Cv(CvScore),
    Trial(TrialRecord),
    Summary {
        trials: usize,
        mean_accuracy: f64,
        stddev_accuracy: f64,
        timing: Option<TimingStats>,
    },
}

const CSV_HEADER: [&str; 7] = ["trial", "rho", "lambda", "cv_run", "correct", "tested", "accuracy"];

fn write_report<W: Write>(report: &ExperimentReport, format: ReportFormat, mut w: W) -> std::io::Result<()> {
    match format {
        ReportFormat::JsonLines => {
            let mut line = |l: &Line| -> std::io::Result<()> {
                serde_json::to_writer(&mut w, l)?;
                w.write_all(b"\n")
            };
            line(&Line::Config {
                config: report.config.clone(),
                provenance: report.provenance.clone(),
            })?;
            for s in &report.cv_scores {
                line(&Line::Cv(*s))?;
            }
            for t in &report.trials {
                line(&Line::Trial(t.clone()))?;
            }
            line(&Line::Summary {
                trials: report.trials.len(),
                mean_accuracy: report.mean_accuracy,
                stddev_accuracy: report.stddev_accuracy,
                timing: report.timing,
            })
        }
        ReportFormat::Csv => {
            let mut out = csv::WriterBuilder::new().has_headers(false).from_writer(&mut w);
            out.write_record(CSV_HEADER)?;
            for t in &report.trials {
                out.serialize(t)?;
            }
            out.flush()
        }
    }
}

/// Writes the report. Field order is fixed and floats are printed in their
/// shortest round-trip form, so equal reports give byte-identical files.
pub fn emit_report(report: &ExperimentReport, path: impl AsRef<Path>, format: ReportFormat) -> Result<()> {
    let path = path.as_ref();
    let f = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(f);
    write_report(report, format, &mut w)
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

/// Renders the report in memory.
pub fn render_report(report: &ExperimentReport, format: ReportFormat) -> Vec<u8> {
    let mut buf = Vec::new();
    write_report(report, format, &mut buf).expect("writing to memory cannot fail");
    buf
}

/// Parses a JSON-lines report.
pub fn parse_report(text: &str) -> Result<ExperimentReport> {
    let bad = |m: String| Error::format("report", m);
    let mut config = None;
    let mut cv_scores = Vec::new();
    let mut trials = Vec::new();
    let mut summary = None;
    for (i, raw) in text.lines().enumerate() {
        if raw.trim().is_empty() {
            continue;
        }
        let line: Line = serde_json::from_str(raw).map_err(|e| bad(format!("line {}: {e}", i + 1)))?;
        match line {
            Line::Config { config: c, provenance } => config = Some((c, provenance)),
            Line::Cv(s) => cv_scores.push(s),
            Line::Trial(t) => trials.push(t),
            Line::Summary {
                trials: n,
                mean_accuracy,
                stddev_accuracy,
                timing,
            } => summary = Some((n, mean_accuracy, stddev_accuracy, timing)),
        }
    }
    let (config, provenance) = config.ok_or_else(|| bad("missing config record".into()))?;
    let (n, mean_accuracy, stddev_accuracy, timing) = summary.ok_or_else(|| bad("missing summary record".into()))?;
    if n != trials.len() {
        return Err(bad(format!("summary counts {n} trials, found {}", trials.len())));
    }
    Ok(ExperimentReport {
        config,
        provenance,
        trials,
        cv_scores,
        mean_accuracy,
        stddev_accuracy,
        timing,
    })
}

pub fn read_report(path: impl AsRef<Path>) -> Result<ExperimentReport> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_report(&text)
}

/// Parses the trial rows of a CSV report.
pub fn parse_csv_trials<R: std::io::Read>(r: R) -> Result<Vec<TrialRecord>> {
    let mut rd = csv::ReaderBuilder::new().from_reader(BufReader::new(r));
    let header = rd.headers().map_err(|e| Error::format("csv report", e.to_string()))?;
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::format("csv report", format!("unexpected header {header:?}")));
    }
    rd.deserialize()
        .map(|row| row.map_err(|e| Error::format("csv report", e.to_string())))
        .collect()
}

/// Human-readable summary, one line per field.
pub fn summarize(report: &ExperimentReport) -> String {
    let mut s = String::new();
    let cfg = &report.config;
    s += &format!("dataset      {}\n", report.provenance.join(" | "));
    s += &format!(
        "coder        {} (T = {}, tol = {:e})\n",
        cfg.coder, cfg.solver.max_iters, cfg.solver.tol
    );
    s += &format!(
        "split        {} per class, {} trials, seed {}\n",
        cfg.split.per_class, cfg.split.trials, cfg.split.seed
    );
    if let Some(t) = report.trials.first() {
        s += &format!("rho/lambda   {} / {}\n", t.rho, t.lambda);
    }
    s += &format!(
        "accuracy     {:.2}% ± {:.2}\n",
        100.0 * report.mean_accuracy,
        100.0 * report.stddev_accuracy
    );
    if let Some(t) = report.timing {
        s += &format!(
            "per query    mean {:.3e} s, median {:.3e} s over {} queries\n",
            t.mean_seconds, t.median_seconds, t.queries
        );
    }
    s
}
