use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use nrc::bench::{
    cross_validate, emit_report, read_report, render_report, run_experiment, summarize, ExperimentConfig,
    ModelBundle, ReportFormat,
};
use nrc::data_io::{stratified_sample, DatasetManifest, SplitSpec};
use nrc::error::ErrorKind;
use nrc::solvers::{CoderKind, SolverConfig};
use nrc::{Error, Result};

#[derive(Parser)]
#[command(name = "nrc", version, about = "Representation-based classification with NNLS, ridge and lasso coders")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a classifier on a dataset's training partition and save it.
    Fit(FitArgs),
    /// Classify a dataset partition with a saved model.
    Predict(PredictArgs),
    /// Cross-validate the tuned hyperparameter on one training draw.
    Cv(CvArgs),
    /// Run a multi-trial experiment and write its report.
    Bench(BenchArgs),
    /// Summarise or convert a JSON-lines report.
    Report(ReportArgs),
}

#[derive(Args)]
struct SolverArgs {
    /// nnls, ridge or lasso
    #[arg(long, default_value = "nnls")]
    coder: CoderKind,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    /// Iteration cap T
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    pca_dim: Option<usize>,
}

impl SolverArgs {
    fn solver(&self) -> SolverConfig {
        let mut s = SolverConfig::default();
        if let Some(v) = self.rho {
            s.rho = v;
        }
        if let Some(v) = self.lambda {
            s.lambda = v;
        }
        if let Some(v) = self.max_iters {
            s.max_iters = v;
        }
        if let Some(v) = self.tol {
            s.tol = v;
        }
        s
    }
}

#[derive(Args)]
struct FitArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[command(flatten)]
    solver: SolverArgs,
    /// Draw this many samples per class instead of using the whole partition.
    #[arg(long)]
    per_class: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(Args)]
struct PredictArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    manifest: PathBuf,
    /// Classify the training partition instead of the test partition.
    #[arg(long)]
    train: bool,
    /// CSV file receiving `index,label,predicted` rows.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CvArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long)]
    per_class: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 5)]
    folds: usize,
    /// Comma-separated candidate values (defaults to the built-in grid)
    #[arg(long, value_delimiter = ',')]
    grid: Vec<f64>,
}

#[derive(Args)]
struct BenchArgs {
    /// Experiment config (TOML). The flags below build one when it is absent.
    #[arg(long, conflicts_with_all = ["manifest", "per_class"])]
    config: Option<PathBuf>,
    #[arg(long, required_unless_present = "config")]
    manifest: Option<PathBuf>,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long, required_unless_present = "config")]
    per_class: Option<usize>,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of held-out queries to time (0 keeps the report deterministic)
    #[arg(long, default_value_t = 0)]
    timing_queries: usize,
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// json-lines or csv
    #[arg(long, default_value = "json-lines")]
    format: ReportFormat,
}

#[derive(Args)]
struct ReportArgs {
    /// JSON-lines report written by `bench`.
    input: PathBuf,
    /// Write the report in this format (json-lines or csv) instead of a summary.
    #[arg(long, requires = "out")]
    format: Option<ReportFormat>,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

fn fit(a: FitArgs) -> Result<()> {
    let m = DatasetManifest::load(&a.manifest)?;
    let raw = m.read_train()?;
    let train = match a.per_class {
        Some(per_class) => {
            let spec = SplitSpec {
                per_class,
                seed: a.seed,
                trials: 1,
            };
            stratified_sample(&raw, &spec, 0)?.0
        }
        None => raw.to_labeled()?,
    };
    let model = ModelBundle::fit(&train, a.solver.coder, a.solver.solver(), a.solver.pca_dim)?;
    model.save(&a.out)?;
    println!(
        "fitted {} on {} samples, {} classes -> {}",
        a.solver.coder,
        train.len(),
        train.num_classes(),
        a.out.display()
    );
    Ok(())
}

fn predict(a: PredictArgs) -> Result<()> {
    let model = ModelBundle::load(&a.model)?;
    let m = DatasetManifest::load(&a.manifest)?;
    let data = match (a.train, m.read_test()?) {
        (false, Some(t)) => t,
        (false, None) => {
            return Err(Error::format("dataset manifest", "no test partition; pass --train"));
        }
        (true, _) => m.read_train()?,
    };
    let predicted = model.predict_labels(data.features())?;
    let correct = predicted.iter().zip(data.labels()).filter(|(p, l)| p == l).count();
    if let Some(out) = &a.out {
        let mut w = csv::Writer::from_path(out).map_err(|e| Error::format("csv output", e.to_string()))?;
        let rows = std::iter::once(["index".to_string(), "label".into(), "predicted".into()]).chain(
            predicted
                .iter()
                .zip(data.labels())
                .enumerate()
                .map(|(i, (p, l))| [i.to_string(), l.to_string(), p.to_string()]),
        );
        for r in rows {
            w.write_record(&r).map_err(|e| Error::format("csv output", e.to_string()))?;
        }
        w.flush().map_err(|e| Error::io(out, e))?;
    }
    println!(
        "accuracy {:.4} ({correct}/{})",
        correct as f64 / data.len().max(1) as f64,
        data.len()
    );
    Ok(())
}

fn cv(a: CvArgs) -> Result<()> {
    let m = DatasetManifest::load(&a.manifest)?;
    let spec = SplitSpec {
        per_class: a.per_class,
        seed: a.seed,
        trials: 1,
    };
    let mut cfg = ExperimentConfig::new(&a.manifest, a.solver.coder, spec);
    cfg.solver = a.solver.solver();
    cfg.cv_folds = a.folds;
    cfg.pca_dim = a.solver.pca_dim;
    if !a.grid.is_empty() {
        match cfg.tuned() {
            nrc::bench::Tuned::Rho => cfg.rho_grid = a.grid.clone(),
            nrc::bench::Tuned::Lambda => cfg.lambda_grid = a.grid.clone(),
        }
    }
    let (train, _) = stratified_sample(&m.read_train()?, &spec, 0)?;
    let out = cross_validate(&train, &cfg, 0)?;
    for s in &out.scores {
        println!("{} = {:<10} accuracy {:.4}", cfg.tuned().name(), s.value, s.accuracy);
    }
    println!("chosen {} = {}", cfg.tuned().name(), out.value);
    Ok(())
}

fn bench(a: BenchArgs) -> Result<()> {
    let cfg = match &a.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => {
            let spec = SplitSpec {
                per_class: a.per_class.expect("required by clap"),
                seed: a.seed,
                trials: a.trials,
            };
            let mut c = ExperimentConfig::new(a.manifest.clone().expect("required by clap"), a.solver.coder, spec);
            c.solver = a.solver.solver();
            c.pca_dim = a.solver.pca_dim;
            c.timing_queries = a.timing_queries;
            c
        }
    };
    let report = run_experiment(&cfg)?;
    match &a.out {
        Some(p) => emit_report(&report, p, a.format)?,
        None => print!("{}", String::from_utf8_lossy(&render_report(&report, a.format))),
    }
    eprint!("{}", summarize(&report));
    Ok(())
}

fn report(a: ReportArgs) -> Result<()> {
    let r = read_report(&a.input)?;
    match (a.format, &a.out) {
        (Some(f), Some(out)) => emit_report(&r, out, f),
        _ => {
            print!("{}", summarize(&r));
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.cmd {
        Command::Fit(a) => fit(a),
        Command::Predict(a) => predict(a),
        Command::Cv(a) => cv(a),
        Command::Bench(a) => bench(a),
        Command::Report(a) => report(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e.kind() {
                ErrorKind::Usage => 1,
                ErrorKind::Data => 2,
                ErrorKind::Numerical => 3,
            })
        }
    }
}
