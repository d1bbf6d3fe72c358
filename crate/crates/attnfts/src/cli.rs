//! Command-line pipeline: synthesize data, train, evaluate, grid-search,
//! and collate reports.
//!
//! All commands are driven by a single flat JSON config document (see
//! [`RunConfig`]); unknown keys are rejected so typos fail loudly before any
//! work starts. Outputs are plain CSV/JSON files and are byte-identical for
//! a fixed config and seed, regardless of `--jobs`.
//!
//! Exit codes: 0 success, 1 usage error, 2 config/data error, 3
//! runtime/numeric error. Every failure prints a one-line diagnostic to
//! stderr.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::data::{self, PriceSeries, SyntheticSpec};
use crate::error::{Error, Result};
use crate::evaluation::{self, EvalReport, SplitPlan};
use crate::model::{Model, ModelConfig, Variant};
use crate::rng::derive_seed;
use crate::training::{self, TrainConfig};
use crate::tuning::{self, Grid};

/// Environment variable that overrides the config's global seed.
pub const SEED_ENV_VAR: &str = "ATTNFTS_SEED";

const CONFIG_SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(
    name = "attnfts",
    version,
    about = "Train and evaluate LSTM forecasters (with and without attention) on daily price series"
)]
struct Cli {
    /// Worker threads for evaluate/gridsearch (default: logical CPUs).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic price series CSV from a generator spec.
    Synth {
        /// JSON file holding a synthetic-series spec.
        #[arg(long)]
        spec: PathBuf,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Train one model; writes checkpoint.json and loss_history.csv.
    Train {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run the configured split plan; writes eval_report.json and .csv.
    Evaluate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Grid search; writes tune_result.csv and best_config.json.
    Gridsearch {
        #[arg(long)]
        config: PathBuf,
    },
    /// Collate eval reports and tuning results under a directory into
    /// summary.csv.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

/// Where a run's input series comes from: a CSV file or a generator spec.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum DataSource {
    Csv { path: PathBuf },
    Synthetic(SyntheticSpec),
}

/// Optional training section of the run config; unset fields fall back to
/// the per-variant defaults.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_epochs: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub batch_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shuffle_each_epoch: Option<bool>,
}

/// The single config document consumed by `train`, `evaluate`, and
/// `gridsearch`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    /// Global seed; model and shuffle seeds are derived from it.
    #[serde(default)]
    pub seed: u64,
    pub output_dir: PathBuf,
    pub data: DataSource,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub train: Option<TrainSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plan: Option<SplitPlan>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<Grid>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let config: RunConfig =
            serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        if config.schema_version != CONFIG_SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "unsupported schema_version {} (expected {CONFIG_SCHEMA_VERSION})",
                config.schema_version
            )));
        }
        Ok(config)
    }

    /// Validates every present section before any work starts.
    pub fn validate(&self) -> Result<()> {
        if let DataSource::Synthetic(spec) = &self.data {
            spec.validate()?;
        }
        if let Some(model) = &self.model {
            model.validate()?;
        }
        if let Some(grid) = &self.grid {
            grid.validate()?;
        }
        // Plan parameters are validated when splits are planned; train
        // overrides are validated after merging with defaults.
        Ok(())
    }

    fn load_series(&self) -> Result<PriceSeries> {
        match &self.data {
            DataSource::Csv { path } => data::load_csv(path),
            DataSource::Synthetic(spec) => data::synthesize(spec),
        }
    }

    /// Model config with its seed derived from the effective global seed.
    fn model_config(&self, seed: u64) -> Result<ModelConfig> {
        let mut config = self
            .model
            .clone()
            .ok_or_else(|| Error::Config("missing 'model' section".into()))?;
        config.seed = derive_seed(seed, 1);
        Ok(config)
    }

    /// Training config: per-variant defaults overlaid with the train
    /// section, seeded from the effective global seed.
    fn train_config(&self, variant: Variant, seed: u64) -> Result<TrainConfig> {
        let mut config = TrainConfig::default_for(variant);
        if let Some(section) = &self.train {
            if let Some(max_epochs) = section.max_epochs {
                config.max_epochs = max_epochs;
            }
            if let Some(batch_size) = section.batch_size {
                config.batch_size = batch_size;
            }
            if let Some(shuffle) = section.shuffle_each_epoch {
                config.shuffle_each_epoch = shuffle;
            }
        }
        config.seed = derive_seed(seed, 2);
        config.validate()?;
        Ok(config)
    }

    fn plan(&self) -> SplitPlan {
        self.plan
            .clone()
            .unwrap_or(SplitPlan::FixedOrigin { train_frac: 0.8 })
    }
}

/// The effective seed: `ATTNFTS_SEED` overrides the config value.
fn effective_seed(config: &RunConfig) -> Result<u64> {
    match std::env::var(SEED_ENV_VAR) {
        Ok(text) => text
            .trim()
            .parse()
            .map_err(|e| Error::Config(format!("{SEED_ENV_VAR}='{text}' is not a u64: {e}"))),
        Err(_) => Ok(config.seed),
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    std::fs::write(path, contents)?;
    Ok(())
}

fn cmd_synth(spec_path: &Path, out: &Path) -> Result<()> {
    let text = std::fs::read_to_string(spec_path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", spec_path.display())))?;
    let spec: SyntheticSpec = serde_json::from_str(&text)
        .map_err(|e| Error::Config(format!("{}: {e}", spec_path.display())))?;
    let series = data::synthesize(&spec)?;
    let mut buf = Vec::new();
    series.write_csv(&mut buf)?;
    write_file(out, std::str::from_utf8(&buf).expect("csv is utf-8"))?;
    println!("wrote {} rows to {}", series.len(), out.display());
    Ok(())
}

/// Trains on the first split of the configured plan (train segment for
/// fitting, validation segment for the loss trace).
fn cmd_train(config: &RunConfig) -> Result<()> {
    let seed = effective_seed(config)?;
    let series = config.load_series()?;
    let model_config = config.model_config(seed)?;
    let train_config = config.train_config(model_config.variant, seed)?;
    let plan = config.plan();

    let splits = evaluation::plan_splits(&plan, series.len())?;
    let split = &splits[0];
    let (_, train_ws, val_ws) = evaluation::split_windows(&series, split, model_config.lag)?;

    let mut model = Model::build(model_config)?;
    let history = training::fit(&mut model, &train_ws, &val_ws, &train_config)?;

    let checkpoint_path = config.output_dir.join("checkpoint.json");
    if let Some(parent) = checkpoint_path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    model.save_to_path(&checkpoint_path)?;
    write_file(&config.output_dir.join("loss_history.csv"), &history.to_csv())?;

    let last = history.final_epoch().expect("at least one epoch");
    println!(
        "trained {} epochs on {} windows; final train loss {}, val loss {}",
        history.len(),
        train_ws.len(),
        last.train_loss,
        last.val_loss
    );
    println!("wrote {}", checkpoint_path.display());
    Ok(())
}

fn cmd_evaluate(config: &RunConfig) -> Result<()> {
    let seed = effective_seed(config)?;
    let series = config.load_series()?;
    let model_config = config.model_config(seed)?;
    let train_config = config.train_config(model_config.variant, seed)?;
    let plan = config.plan();

    let report = evaluation::evaluate(&model_config, &train_config, &series, &plan)?;
    let json = serde_json::to_string_pretty(&report)?;
    write_file(&config.output_dir.join("eval_report.json"), &json)?;
    write_file(&config.output_dir.join("eval_report.csv"), &report.to_csv())?;

    println!(
        "{} over {} splits: mean val loss {}, mean up-down accuracy {}",
        report.plan.describe(),
        report.splits.len(),
        report.aggregate.mean_val_loss,
        report.aggregate.mean_up_down_accuracy
    );
    Ok(())
}

fn cmd_gridsearch(config: &RunConfig) -> Result<()> {
    let seed = effective_seed(config)?;
    let series = config.load_series()?;
    let grid = config
        .grid
        .clone()
        .ok_or_else(|| Error::Config("missing 'grid' section".into()))?;
    let mut train_config = config.train_config(grid.variant, seed)?;
    train_config.seed = derive_seed(seed, 3);
    let plan = config.plan();

    let result = tuning::grid_search(&grid, &series, &plan, &train_config)?;
    write_file(&config.output_dir.join("tune_result.csv"), &result.to_csv())?;
    let best = result.best_config(1, derive_seed(seed, 1));
    let best_json = serde_json::to_string_pretty(&serde_json::json!({
        "schema_version": CONFIG_SCHEMA_VERSION,
        "model": best,
        "best_cell": result.best,
    }))?;
    write_file(&config.output_dir.join("best_config.json"), &best_json)?;

    println!(
        "searched {} cells; best: size={} lag={} dropout={}",
        result.cells.len(),
        result.best.size,
        result.best.lag,
        result.best.dropout
    );
    Ok(())
}

/// One collated row of the summary table.
#[derive(Debug, Serialize)]
struct SummaryRow {
    source: String,
    series: String,
    variant: String,
    detail: String,
    val_loss: f64,
    up_down_accuracy: f64,
}

fn collect_reports(dir: &Path, rows: &mut Vec<SummaryRow>) -> Result<()> {
    let mut entries: Vec<PathBuf> = std::fs::read_dir(dir)?
        .collect::<std::io::Result<Vec<_>>>()?
        .into_iter()
        .map(|e| e.path())
        .collect();
    entries.sort();
    for path in entries {
        if path.is_dir() {
            collect_reports(&path, rows)?;
        } else if path.file_name().is_some_and(|n| n == "eval_report.json") {
            let text = std::fs::read_to_string(&path)?;
            let report: EvalReport = serde_json::from_str(&text)
                .map_err(|e| Error::Data(format!("{}: {e}", path.display())))?;
            rows.push(SummaryRow {
                source: path.display().to_string(),
                series: report.series_name.clone(),
                variant: report.config.variant.to_string(),
                detail: report.plan.describe(),
                val_loss: report.aggregate.mean_val_loss,
                up_down_accuracy: report.aggregate.mean_up_down_accuracy,
            });
        } else if path.file_name().is_some_and(|n| n == "best_config.json") {
            let text = std::fs::read_to_string(&path)?;
            let value: serde_json::Value = serde_json::from_str(&text)
                .map_err(|e| Error::Data(format!("{}: {e}", path.display())))?;
            let cell = &value["best_cell"];
            if let (Some(size), Some(lag), Some(dropout), Some(loss), Some(acc)) = (
                cell["size"].as_u64(),
                cell["lag"].as_u64(),
                cell["dropout"].as_f64(),
                cell["outcome"]["val_loss"].as_f64(),
                cell["outcome"]["up_down_accuracy"].as_f64(),
            ) {
                rows.push(SummaryRow {
                    source: path.display().to_string(),
                    series: String::new(),
                    variant: value["model"]["variant"].as_str().unwrap_or("?").to_string(),
                    detail: format!("best cell size={size} lag={lag} dropout={dropout}"),
                    val_loss: loss,
                    up_down_accuracy: acc,
                });
            }
        }
    }
    Ok(())
}

fn cmd_report(input: &Path) -> Result<()> {
    if !input.is_dir() {
        return Err(Error::Data(format!("{} is not a directory", input.display())));
    }
    let mut rows = Vec::new();
    collect_reports(input, &mut rows)?;
    if rows.is_empty() {
        return Err(Error::Data(format!(
            "no eval_report.json or best_config.json found under {}",
            input.display()
        )));
    }
    let mut csv = String::from("source,series,variant,detail,val_loss,up_down_accuracy\n");
    for row in &rows {
        csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            row.source, row.series, row.variant, row.detail, row.val_loss, row.up_down_accuracy
        ));
    }
    write_file(&input.join("summary.csv"), &csv)?;

    println!("{:<10} {:<24} {:<40} {:>12} {:>10}", "variant", "series", "detail", "val_loss", "accuracy");
    for row in &rows {
        println!(
            "{:<10} {:<24} {:<40} {:>12.6} {:>10.4}",
            row.variant, row.series, row.detail, row.val_loss, row.up_down_accuracy
        );
    }
    println!("wrote {}", input.join("summary.csv").display());
    Ok(())
}

fn exit_code_for(error: &Error) -> i32 {
    match error {
        Error::Config(_) | Error::Data(_) | Error::Plan(_) | Error::Io(_) | Error::Json(_) => 2,
        Error::Shape { .. } | Error::Argument(_) | Error::Numeric(_) | Error::Tuning(_) => 3,
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    let jobs = cli
        .jobs
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if jobs == 0 {
        return Err(Error::Config("--jobs must be >= 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Config(format!("cannot build worker pool: {e}")))?;
    pool.install(|| match &cli.command {
        Command::Synth { spec, out } => cmd_synth(spec, out),
        Command::Train { config } => {
            let config = RunConfig::load(config)?;
            config.validate()?;
            cmd_train(&config)
        }
        Command::Evaluate { config } => {
            let config = RunConfig::load(config)?;
            config.validate()?;
            cmd_evaluate(&config)
        }
        Command::Gridsearch { config } => {
            let config = RunConfig::load(config)?;
            config.validate()?;
            cmd_gridsearch(&config)
        }
        Command::Report { input } => cmd_report(input),
    })
}

/// Parses the process arguments, runs the selected command, and returns the
/// process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help / --version are not errors.
            if e.kind() == clap::error::ErrorKind::DisplayHelp
                || e.kind() == clap::error::ErrorKind::DisplayVersion
            {
                print!("{e}");
                return 0;
            }
            // clap's rendering already carries an "error:" prefix.
            eprint!("{e}");
            return 1;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn run_config_rejects_unknown_keys() {
        let json = r#"{
            "schema_version": 1,
            "seed": 1,
            "output_dir": "out",
            "data": { "synthetic": { "kind": "sine", "length": 80, "noise_std": 0.0, "seed": 1 } },
            "not_a_key": true
        }"#;
        let err = serde_json::from_str::<RunConfig>(json).unwrap_err().to_string();
        assert!(err.contains("not_a_key"), "{err}");
    }

    #[test]
    fn run_config_round_trips() {
        let json = r#"{
            "schema_version": 1,
            "seed": 42,
            "output_dir": "out",
            "data": { "csv": { "path": "prices.csv" } },
            "model": { "variant": "attention", "size": 16, "lag": 15, "dropout": 0.05 },
            "train": { "max_epochs": 10 },
            "plan": { "kind": "rolling_window", "train_len": 50, "val_len": 10, "stride": 10 }
        }"#;
        let config: RunConfig = serde_json::from_str(json).unwrap();
        config.validate().unwrap();
        assert_eq!(config.model.as_ref().unwrap().input_dim, 1);
        let train = config.train_config(Variant::Attention, 42).unwrap();
        assert_eq!(train.max_epochs, 10);
        assert_eq!(train.batch_size, 32);
    }

    #[test]
    fn train_defaults_follow_variant() {
        let json = r#"{
            "schema_version": 1,
            "output_dir": "out",
            "data": { "synthetic": { "kind": "sine", "length": 80, "noise_std": 0.0, "seed": 1 } }
        }"#;
        let config: RunConfig = serde_json::from_str(json).unwrap();
        assert_eq!(config.train_config(Variant::Plain, 0).unwrap().max_epochs, 100);
        assert_eq!(config.train_config(Variant::Attention, 0).unwrap().max_epochs, 25);
    }

    #[test]
    fn schema_version_is_enforced() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("config.json");
        std::fs::write(
            &path,
            r#"{"schema_version": 2, "output_dir": "out",
                "data": { "synthetic": { "kind": "sine", "length": 80, "noise_std": 0.0, "seed": 1 } }}"#,
        )
        .unwrap();
        let err = RunConfig::load(&path).unwrap_err().to_string();
        assert!(err.contains("schema_version"), "{err}");
    }

    #[test]
    fn exit_codes_group_error_classes() {
        assert_eq!(exit_code_for(&Error::Config("x".into())), 2);
        assert_eq!(exit_code_for(&Error::Data("x".into())), 2);
        assert_eq!(exit_code_for(&Error::Plan("x".into())), 2);
        assert_eq!(exit_code_for(&Error::Numeric("x".into())), 3);
        assert_eq!(exit_code_for(&Error::Tuning("x".into())), 3);
    }
}
