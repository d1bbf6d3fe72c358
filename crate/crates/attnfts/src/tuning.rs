//! Deterministic grid search over (size, lag, dropout).
//!
//! Every cell is trained and evaluated through the walk-forward harness; no
//! pruning, so the full loss surface can be tabulated afterwards. Cells run
//! in parallel but are seeded and collected by cell index, so the result is
//! independent of worker count and execution order.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::PriceSeries;
use crate::error::{Error, Result};
use crate::evaluation::{self, SplitPlan};
use crate::model::{ModelConfig, Variant};
use crate::rng::derive_seed;
use crate::training::TrainConfig;

fn default_sizes() -> Vec<usize> {
    vec![16, 32, 64]
}

fn default_lags() -> Vec<usize> {
    vec![5, 15, 30, 60]
}

fn default_dropouts() -> Vec<f64> {
    vec![0.0, 0.05, 0.1, 0.2, 0.3]
}

fn default_seeds_per_cell() -> usize {
    1
}

/// Search space. Defaults bracket the regimes where both variants find
/// their optima (sizes 16-64, lags 5-60, dropout 0-0.3).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    #[serde(default = "default_sizes")]
    pub sizes: Vec<usize>,
    #[serde(default = "default_lags")]
    pub lags: Vec<usize>,
    #[serde(default = "default_dropouts")]
    pub dropouts: Vec<f64>,
    pub variant: Variant,
    #[serde(default = "default_seeds_per_cell")]
    pub seeds_per_cell: usize,
}

impl Grid {
    pub fn default_for(variant: Variant) -> Grid {
        Grid {
            sizes: default_sizes(),
            lags: default_lags(),
            dropouts: default_dropouts(),
            variant,
            seeds_per_cell: default_seeds_per_cell(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut violations = Vec::new();
        if self.sizes.is_empty() {
            violations.push("sizes must be nonempty".to_string());
        }
        if self.lags.is_empty() {
            violations.push("lags must be nonempty".to_string());
        }
        if self.dropouts.is_empty() {
            violations.push("dropouts must be nonempty".to_string());
        }
        if self.seeds_per_cell < 1 {
            violations.push(format!(
                "seeds_per_cell must be >= 1, got {}",
                self.seeds_per_cell
            ));
        }
        for &size in &self.sizes {
            if size < 1 {
                violations.push(format!("size {size} is invalid"));
            }
        }
        for &lag in &self.lags {
            if lag < 2 {
                violations.push(format!("lag {lag} is invalid (must be >= 2)"));
            }
        }
        for &dropout in &self.dropouts {
            if !(0.0..1.0).contains(&dropout) {
                violations.push(format!("dropout {dropout} is invalid (must be in [0, 1))"));
            }
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(violations.join("; ")))
        }
    }

    pub fn cell_count(&self) -> usize {
        self.sizes.len() * self.lags.len() * self.dropouts.len()
    }

    /// Cells in canonical order: sizes outermost, then lags, then dropouts.
    pub fn cells(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::with_capacity(self.cell_count());
        for &size in &self.sizes {
            for &lag in &self.lags {
                for &dropout in &self.dropouts {
                    out.push((size, lag, dropout));
                }
            }
        }
        out
    }
}

/// Outcome of one grid cell: metrics averaged over its seed repetitions, or
/// the error that made it fail.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CellOutcome {
    Ok {
        val_loss: f64,
        up_down_accuracy: f64,
        epochs_run: usize,
    },
    Failed {
        error: String,
    },
}

/// One evaluated cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellRecord {
    pub size: usize,
    pub lag: usize,
    pub dropout: f64,
    pub outcome: CellOutcome,
}

/// Grid-search output: every cell (failures included) plus the selected
/// best cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuneResult {
    pub variant: Variant,
    pub cells: Vec<CellRecord>,
    pub best: CellRecord,
}

impl TuneResult {
    /// CSV serialization: `size,lag,dropout,val_loss,accuracy,epochs`.
    /// Failed cells keep their coordinates with empty metric fields.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("size,lag,dropout,val_loss,accuracy,epochs\n");
        for cell in &self.cells {
            match &cell.outcome {
                CellOutcome::Ok {
                    val_loss,
                    up_down_accuracy,
                    epochs_run,
                } => {
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{},{}",
                        cell.size, cell.lag, cell.dropout, val_loss, up_down_accuracy, epochs_run
                    );
                }
                CellOutcome::Failed { .. } => {
                    let _ = writeln!(out, "{},{},{},,,", cell.size, cell.lag, cell.dropout);
                }
            }
        }
        out
    }

    /// The best cell as a buildable model config.
    pub fn best_config(&self, input_dim: usize, seed: u64) -> ModelConfig {
        ModelConfig {
            variant: self.variant,
            size: self.best.size,
            lag: self.best.lag,
            dropout: self.best.dropout,
            input_dim,
            seed,
        }
    }
}

/// Picks the successful cell with minimum validation loss. Ties prefer the
/// simpler model: smaller size, then smaller lag, then smaller dropout.
pub fn select_best(cells: &[CellRecord]) -> Result<CellRecord> {
    cells
        .iter()
        .filter_map(|cell| match &cell.outcome {
            CellOutcome::Ok { val_loss, .. } => Some((cell, *val_loss)),
            CellOutcome::Failed { .. } => None,
        })
        .min_by(|(a, loss_a), (b, loss_b)| {
            loss_a
                .partial_cmp(loss_b)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.size.cmp(&b.size))
                .then(a.lag.cmp(&b.lag))
                .then(a.dropout.partial_cmp(&b.dropout).unwrap_or(std::cmp::Ordering::Equal))
        })
        .map(|(cell, _)| cell.clone())
        .ok_or_else(|| Error::Tuning("every grid cell failed".into()))
}

/// Evaluates every cell of the grid on the series under the given plan.
///
/// Each (cell, repetition) pair gets model and shuffle seeds derived from
/// `train_cfg.seed` and its linear index, so results do not depend on how
/// cells are scheduled across workers. A failing cell is recorded as failed
/// rather than dropped.
pub fn grid_search(
    grid: &Grid,
    series: &PriceSeries,
    plan: &SplitPlan,
    train_cfg: &TrainConfig,
) -> Result<TuneResult> {
    grid.validate()?;
    train_cfg.validate()?;
    let cells = grid.cells();

    let records: Vec<CellRecord> = cells
        .par_iter()
        .enumerate()
        .map(|(cell_idx, &(size, lag, dropout))| {
            let mut losses = Vec::with_capacity(grid.seeds_per_cell);
            let mut accuracies = Vec::with_capacity(grid.seeds_per_cell);
            let mut failure = None;
            for rep in 0..grid.seeds_per_cell {
                let stream = (cell_idx * grid.seeds_per_cell + rep) as u64;
                let config = ModelConfig {
                    variant: grid.variant,
                    size,
                    lag,
                    dropout,
                    input_dim: 1,
                    seed: derive_seed(train_cfg.seed, stream * 2 + 1),
                };
                let mut cell_train = train_cfg.clone();
                cell_train.seed = derive_seed(train_cfg.seed, stream * 2 + 2);
                match evaluation::evaluate(&config, &cell_train, series, plan) {
                    Ok(report) => {
                        losses.push(report.aggregate.mean_val_loss);
                        accuracies.push(report.aggregate.mean_up_down_accuracy);
                    }
                    Err(e) => {
                        failure = Some(e.to_string());
                        break;
                    }
                }
            }
            let outcome = match failure {
                Some(error) => CellOutcome::Failed { error },
                None => CellOutcome::Ok {
                    val_loss: losses.iter().sum::<f64>() / losses.len() as f64,
                    up_down_accuracy: accuracies.iter().sum::<f64>() / accuracies.len() as f64,
                    epochs_run: train_cfg.max_epochs,
                },
            };
            CellRecord {
                size,
                lag,
                dropout,
                outcome,
            }
        })
        .collect();

    let best = select_best(&records)?;
    Ok(TuneResult {
        variant: grid.variant,
        cells: records,
        best,
    })
}
