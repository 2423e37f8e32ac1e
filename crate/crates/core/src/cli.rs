//! Command-line front end. The `kmlearn` binary only parses arguments, sets
//! up logging and calls [`run`].

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bench::{bench_bqp, bench_eig, BQP_BENCH_HEADER, BQP_VARIANTS, EIG_BENCH_HEADER};
use crate::bqp::{DualConfig, EigMode, Method};
use crate::data::{
    generate_synthetic, load_jsonl, load_ml100k, load_ml1m, save_jsonl, split, SplitConfig,
    SyntheticConfig,
};
use crate::error::KmError;
use crate::interpret::{build_adjacency, influence_scores, mining_accuracy, RaterFilter};
use crate::model::{training_rmse, RatingDataset};
use crate::persist::StoredModel;
use crate::rounding::RoundingConfig;
use crate::trainer::{bcd_train, TrainConfig, TrainReport};

#[derive(Parser, Debug)]
#[command(
    name = "kmlearn",
    version,
    about = "Train and inspect Kolmogorov models"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Train a model; writes model.json, report.json and rmse.csv.
    Train {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Score every rating of a dataset with a trained model; writes predictions.csv.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Influence scores and relation-mining accuracy; writes influence.csv and accuracy.csv.
    Interpret {
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, default_value_t = 0.5)]
        like_threshold: f64,
        /// List every rater of an anchor item, not only those who like it.
        #[arg(long)]
        all_raters: bool,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Time plain GD against enhanced GD (exact and Lanczos); writes bench.csv.
    BenchBqp {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Time exact against thresholded Lanczos eigensolves; writes bench_eig.csv.
    BenchEig {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long, default_value_t = 10)]
        max_items: usize,
        #[arg(long, default_value_t = 20)]
        repeats: usize,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Write a synthetic dataset as dataset.jsonl.
    Synth {
        #[arg(long, default_value_t = 20)]
        users: usize,
        #[arg(long, default_value_t = 40)]
        items: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DatasetKind {
    Ml100k,
    Ml1m,
    Synthetic,
    Jsonl,
}

#[derive(Args, Debug, Clone)]
pub struct DataArgs {
    #[arg(long, value_enum)]
    pub dataset: Option<DatasetKind>,
    /// Ratings file for ml100k (u.data), ml1m (ratings.dat) or jsonl.
    #[arg(long)]
    pub data_path: Option<PathBuf>,
    #[arg(long, default_value_t = 20)]
    pub users: usize,
    #[arg(long, default_value_t = 40)]
    pub items: usize,
    /// Train share for MovieLens files; synthetic data is all train and
    /// JSONL keeps its own labels.
    #[arg(long, default_value_t = 0.8)]
    pub train_fraction: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug, Clone)]
pub struct SolverArgs {
    #[arg(long, default_value_t = 8)]
    pub dim: usize,
    #[arg(long, default_value_t = 100.0)]
    pub gamma: f64,
    #[arg(long, default_value_t = 15)]
    pub i_bcd: usize,
    #[arg(long, default_value_t = 100)]
    pub i_rand: usize,
    #[arg(long, value_enum, default_value_t = MethodArg::EnhancedGd)]
    pub method: MethodArg,
    #[arg(long, value_enum, default_value_t = EigArg::Exact)]
    pub eig_mode: EigArg,
    /// Scale of the Lanczos stopping threshold; larger runs longer and is more accurate [default: 1]
    #[arg(long)]
    pub lanczos_a: Option<f64>,
    #[arg(long, default_value_t = 1e-6)]
    pub eps: f64,
    #[arg(long, default_value_t = 5000)]
    pub max_dual_iters: usize,
    #[arg(long, default_value_t = 0.0)]
    pub lambda_u: f64,
    #[arg(long, default_value_t = 0.0)]
    pub mu_i: f64,
    /// Start every dual line search at step 1.
    #[arg(long)]
    pub no_initial_step: bool,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    pub parallelism: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    PlainGd,
    EnhancedGd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EigArg {
    Exact,
    Lanczos,
}

impl SolverArgs {
    pub fn train_config(&self, seed: u64) -> TrainConfig {
        let defaults = DualConfig::default();
        TrainConfig {
            dim: self.dim,
            i_bcd: self.i_bcd,
            method: match self.method {
                MethodArg::PlainGd => Method::PlainGd,
                MethodArg::EnhancedGd => Method::EnhancedGd,
            },
            dual: DualConfig {
                gamma: self.gamma,
                eps: self.eps,
                max_iters: self.max_dual_iters,
                eig_mode: match self.eig_mode {
                    EigArg::Exact => EigMode::Exact,
                    EigArg::Lanczos => EigMode::Lanczos,
                },
                lanczos_a: self.lanczos_a.unwrap_or(defaults.lanczos_a),
                initial_step: !self.no_initial_step,
                ..defaults
            },
            rounding: RoundingConfig {
                i_rand: self.i_rand,
                seed,
            },
            lambda_u: self.lambda_u,
            mu_i: self.mu_i,
            seed,
            parallelism: self.parallelism,
            ..TrainConfig::default()
        }
    }
}

/// A failed command: the message to print and the process exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<KmError> for CliError {
    fn from(e: KmError) -> Self {
        Self {
            code: 1,
            message: format!("error: {e}"),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        KmError::from(e).into()
    }
}

fn usage_error(kind: ErrorKind, msg: impl std::fmt::Display) -> CliError {
    let err = Cli::command().error(kind, msg);
    CliError {
        code: err.exit_code(),
        message: err.render().to_string(),
    }
}

fn load_dataset(args: &DataArgs) -> Result<RatingDataset, CliError> {
    let kind = args
        .dataset
        .ok_or_else(|| usage_error(ErrorKind::MissingRequiredArgument, "--dataset is required"))?;
    let path = || {
        args.data_path.as_deref().ok_or_else(|| {
            usage_error(
                ErrorKind::MissingRequiredArgument,
                "--data-path is required for this dataset",
            )
        })
    };
    let split_cfg = SplitConfig {
        train_fraction: args.train_fraction,
        seed: args.seed,
    };
    let data = match kind {
        DatasetKind::Ml100k => split(&load_ml100k(path()?)?, &split_cfg)?,
        DatasetKind::Ml1m => split(&load_ml1m(path()?)?, &split_cfg)?,
        DatasetKind::Jsonl => load_jsonl(path()?)?,
        DatasetKind::Synthetic => generate_synthetic(&SyntheticConfig {
            num_users: args.users,
            num_items: args.items,
            seed: args.seed,
        })?,
    };
    log::info!(
        "dataset: {} ratings, {} users, {} items",
        data.len(),
        data.users().len(),
        data.items().len()
    );
    Ok(data)
}

fn load_model(path: &Path) -> Result<StoredModel, CliError> {
    if !path.is_file() {
        return Err(usage_error(
            ErrorKind::ValueValidation,
            format!("model file {} does not exist", path.display()),
        ));
    }
    Ok(StoredModel::load(path)?)
}

fn out_file(dir: &Path, name: &str) -> Result<fs::File, CliError> {
    fs::create_dir_all(dir)?;
    Ok(fs::File::create(dir.join(name))?)
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<(), CliError> {
    let mut f = out_file(dir, name)?;
    serde_json::to_writer_pretty(&mut f, value).map_err(KmError::from)?;
    writeln!(f)?;
    Ok(())
}

fn write_rmse_csv(dir: &Path, rep: &TrainReport) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out_file(dir, "rmse.csv")?);
    w.write_record(["iteration", "train_rmse", "test_rmse"])
        .map_err(KmError::from)?;
    for (k, r) in rep.rmse_per_iteration.iter().enumerate() {
        let test = rep
            .test_rmse_per_iteration
            .get(k)
            .map(|v| v.to_string())
            .unwrap_or_default();
        w.write_record([(k + 1).to_string(), r.to_string(), test])
            .map_err(KmError::from)?;
    }
    w.flush()?;
    Ok(())
}

fn cmd_train(data: &DataArgs, solver: &SolverArgs, out: &Path) -> Result<(), CliError> {
    let ds = load_dataset(data)?;
    let cfg = solver.train_config(data.seed);
    let (params, rep) = bcd_train(&ds, &cfg)?;
    fs::create_dir_all(out)?;
    StoredModel::from_params(&params, ds.users(), ds.items())?.save(out.join("model.json"))?;
    write_json(out, "report.json", &rep)?;
    write_rmse_csv(out, &rep)?;
    println!(
        "trained D={} for {} iterations: training RMSE {:.6}, BQP {:.3}s, LCQP {:.3}s",
        cfg.dim,
        cfg.i_bcd,
        rep.rmse_per_iteration.last().copied().unwrap_or(f64::NAN),
        rep.wall_time_bqp,
        rep.wall_time_lcqp
    );
    if let Some(ev) = &rep.test_evaluation {
        println!("test RMSE {:.6} over {} ratings", ev.rmse, ev.evaluated);
    }
    Ok(())
}

fn cmd_predict(model: &Path, data: &DataArgs, out: &Path) -> Result<(), CliError> {
    let m = load_model(model)?;
    let ds = load_dataset(data)?;
    let mut w = csv::Writer::from_writer(out_file(out, "predictions.csv")?);
    w.write_record(["user", "item", "split", "p", "prediction"])
        .map_err(KmError::from)?;
    let mut scored = 0usize;
    for r in ds.ratings() {
        let u = ds.users().raw_of(r.user).expect("interned user");
        let i = ds.items().raw_of(r.item).expect("interned item");
        let pred = m.predict_raw(u, i);
        scored += pred.is_some() as usize;
        let split = match r.split {
            crate::model::Split::Train => "train",
            crate::model::Split::Test => "test",
        };
        w.write_record([
            u.to_string(),
            i.to_string(),
            split.to_string(),
            r.p.to_string(),
            pred.map(|v| v.to_string()).unwrap_or_default(),
        ])
        .map_err(KmError::from)?;
    }
    w.flush()?;
    println!("scored {scored} of {} ratings", ds.len());
    Ok(())
}

#[derive(Serialize)]
struct AdjacencyStats {
    items: usize,
    inclusions: usize,
    anchors: usize,
    mean_influence: f64,
}

fn cmd_interpret(
    model: &Path,
    data: &DataArgs,
    like_threshold: f64,
    all_raters: bool,
    out: &Path,
) -> Result<(), CliError> {
    let m = load_model(model)?;
    if m.psi.is_empty() {
        return Err(KmError::Validation("model has no items".into()).into());
    }
    let by_raw: std::collections::BTreeMap<usize, _> = m
        .psi
        .iter()
        .map(|(&raw, p)| (raw as usize, p.clone()))
        .collect();
    let adj = build_adjacency(&by_raw)?;
    let scores = influence_scores(&adj);
    let mut w = csv::Writer::from_writer(out_file(out, "influence.csv")?);
    w.write_record(["item", "score"]).map_err(KmError::from)?;
    for (item, s) in &scores {
        w.write_record([item.to_string(), s.to_string()])
            .map_err(KmError::from)?;
    }
    w.flush()?;
    let stats = AdjacencyStats {
        items: adj.len(),
        inclusions: adj.entries.iter().flatten().filter(|&&b| b).count(),
        anchors: scores.values().filter(|&&s| s >= 1.0).count(),
        mean_influence: scores.values().sum::<f64>() / scores.len() as f64,
    };
    write_json(out, "adjacency.json", &stats)?;
    println!(
        "{} items, {} inclusions, {} items with influence 1",
        stats.items, stats.inclusions, stats.anchors
    );

    if data.dataset.is_none() {
        log::warn!("no dataset given, skipping accuracy.csv");
        return Ok(());
    }
    let ds = load_dataset(data)?;
    let params = m.to_params(ds.users(), ds.items())?;
    let filter = if all_raters {
        RaterFilter::AllRaters
    } else {
        RaterFilter::LikersOnly
    };
    let rows = mining_accuracy(&params, &ds, like_threshold, filter)?;
    let mut w = csv::Writer::from_writer(out_file(out, "accuracy.csv")?);
    w.write_record(["item", "user", "rated_count", "accuracy"])
        .map_err(KmError::from)?;
    for r in &rows {
        w.write_record([
            ds.items()
                .raw_of(r.item)
                .expect("interned item")
                .to_string(),
            ds.users()
                .raw_of(r.user)
                .expect("interned user")
                .to_string(),
            r.rated_count.to_string(),
            r.accuracy.to_string(),
        ])
        .map_err(KmError::from)?;
    }
    w.flush()?;
    if !rows.is_empty() {
        let mean = rows.iter().map(|r| r.accuracy).sum::<f64>() / rows.len() as f64;
        println!("{} accuracy rows, mean {:.4}", rows.len(), mean);
    }
    if let Ok(rmse) = training_rmse(&params, &ds) {
        log::info!("training RMSE of loaded model: {rmse:.6}");
    }
    Ok(())
}

fn cmd_bench_bqp(data: &DataArgs, solver: &SolverArgs, out: &Path) -> Result<(), CliError> {
    let ds = load_dataset(data)?;
    let rows = bench_bqp(&ds, &solver.train_config(data.seed), &BQP_VARIANTS)?;
    let mut f = out_file(out, "bench.csv")?;
    writeln!(f, "{BQP_BENCH_HEADER}")?;
    for r in &rows {
        writeln!(f, "{}", r.csv_line())?;
        println!("{}", r.csv_line());
    }
    Ok(())
}

fn cmd_bench_eig(
    data: &DataArgs,
    solver: &SolverArgs,
    max_items: usize,
    repeats: usize,
    out: &Path,
) -> Result<(), CliError> {
    let ds = load_dataset(data)?;
    let cfg = solver.train_config(data.seed);
    let rows = bench_eig(&ds, cfg.dim, &cfg.dual, data.seed, max_items, repeats)?;
    let mut f = out_file(out, "bench_eig.csv")?;
    writeln!(f, "{EIG_BENCH_HEADER}")?;
    for r in &rows {
        writeln!(f, "{}", r.csv_line())?;
        println!("{}", r.csv_line());
    }
    Ok(())
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Train { data, solver, out } => cmd_train(data, solver, out),
        Command::Predict { model, data, out } => cmd_predict(model, data, out),
        Command::Interpret {
            model,
            data,
            like_threshold,
            all_raters,
            out,
        } => cmd_interpret(model, data, *like_threshold, *all_raters, out),
        Command::BenchBqp { data, solver, out } => cmd_bench_bqp(data, solver, out),
        Command::BenchEig {
            data,
            solver,
            max_items,
            repeats,
            out,
        } => cmd_bench_eig(data, solver, *max_items, *repeats, out),
        Command::Synth {
            users,
            items,
            seed,
            out,
        } => {
            let ds = generate_synthetic(&SyntheticConfig {
                num_users: *users,
                num_items: *items,
                seed: *seed,
            })?;
            fs::create_dir_all(out)?;
            save_jsonl(&ds, out.join("dataset.jsonl"))?;
            println!("wrote {} ratings", ds.len());
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clap_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn solver_flags_map_to_config() {
        let cli = Cli::try_parse_from([
            "kmlearn",
            "train",
            "--dataset",
            "synthetic",
            "--dim",
            "5",
            "--method",
            "plain-gd",
            "--eig-mode",
            "lanczos",
            "--lanczos-a",
            "7",
            "--seed",
            "3",
            "--no-initial-step",
        ])
        .unwrap();
        let Command::Train { data, solver, .. } = cli.command else {
            panic!("wrong command")
        };
        let cfg = solver.train_config(data.seed);
        assert_eq!(cfg.dim, 5);
        assert_eq!(cfg.method, Method::PlainGd);
        assert_eq!(cfg.dual.eig_mode, EigMode::Lanczos);
        assert_eq!(cfg.dual.lanczos_a, 7.0);
        assert!(!cfg.dual.initial_step);
        assert_eq!(cfg.seed, 3);
    }

    #[test]
    fn missing_dataset_path_is_usage_error() {
        let args = DataArgs {
            dataset: Some(DatasetKind::Ml100k),
            data_path: None,
            users: 1,
            items: 1,
            train_fraction: 0.8,
            seed: 0,
        };
        assert_eq!(load_dataset(&args).unwrap_err().code, 2);
    }
}
