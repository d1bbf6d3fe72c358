//! Validation-shuffling schemes, directional accuracy, and the per-split
//! retraining harness.
//!
//! Three ways of choosing validation data are supported, all respecting
//! temporal order (training always precedes validation):
//!
//! * fixed origin: one chronological split at a fraction of the series;
//! * rolling origin: the training set grows from the start while the
//!   validation origin advances, results averaged over splits;
//! * rolling window: fixed-length train and validation windows slid
//!   forward through time, results averaged.
//!
//! For each split a fresh model is trained from scratch: the return scaler
//! is fitted on the split's training returns only, so nothing computed at
//! training time can depend on validation-period prices. Validation windows
//! may reach back into trailing training returns for input context (past
//! data predicting the future), but every validation target lies strictly
//! after the training segment.
//!
//! Each validation window contributes exactly one single-step prediction;
//! there is no iterated multi-step forecasting. Losses are reported in the
//! scaled training space (the optimization objective); up-down accuracy is
//! computed on unscaled returns, because the min-max map does not preserve
//! zero and "up vs down" is a statement about returns.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{self, PriceSeries, Scaler, WindowSet};
use crate::error::{Error, Result};
use crate::model::{Model, ModelConfig, Variant};
use crate::rng::derive_seed;
use crate::training::{self, TrainConfig};

fn default_train_frac() -> f64 {
    0.8
}

fn default_num_splits() -> usize {
    5
}

fn default_initial_frac() -> f64 {
    0.5
}

/// One of the three validation-shuffling schemes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SplitPlan {
    /// Single chronological split at `floor(train_frac * n)`.
    FixedOrigin {
        #[serde(default = "default_train_frac")]
        train_frac: f64,
    },
    /// `num_splits` splits with training always starting at index 0 and the
    /// validation origin advancing by `stride` (default: the post-origin
    /// region divided evenly, so `num_splits = 1` degenerates to
    /// `FixedOrigin { train_frac: initial_frac }`). Each validation segment
    /// is one stride long.
    RollingOrigin {
        #[serde(default = "default_num_splits")]
        num_splits: usize,
        #[serde(default = "default_initial_frac")]
        initial_frac: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        stride: Option<usize>,
    },
    /// Fixed-length `[t, t+train_len)` / `[t+train_len, t+train_len+val_len)`
    /// pairs, with `t` advancing by `stride` from 0 while the pair fits.
    RollingWindow {
        train_len: usize,
        val_len: usize,
        stride: usize,
    },
}

/// One train/validation pair of index ranges into the price series.
/// `train` is `[train_start, train_end)` and `val` is `[val_start, val_end)`
/// with `train_end == val_start`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Split {
    pub train_start: usize,
    pub train_end: usize,
    pub val_start: usize,
    pub val_end: usize,
}

impl SplitPlan {
    fn validate(&self) -> Result<()> {
        let mut violations = Vec::new();
        match self {
            SplitPlan::FixedOrigin { train_frac } => {
                if !(*train_frac > 0.0 && *train_frac < 1.0) {
                    violations.push(format!("train_frac must be in (0, 1), got {train_frac}"));
                }
            }
            SplitPlan::RollingOrigin {
                num_splits,
                initial_frac,
                stride,
            } => {
                if *num_splits < 1 {
                    violations.push(format!("num_splits must be >= 1, got {num_splits}"));
                }
                if !(*initial_frac > 0.0 && *initial_frac < 1.0) {
                    violations.push(format!("initial_frac must be in (0, 1), got {initial_frac}"));
                }
                if let Some(s) = stride {
                    if *s < 1 {
                        violations.push(format!("stride must be >= 1, got {s}"));
                    }
                }
            }
            SplitPlan::RollingWindow {
                train_len,
                val_len,
                stride,
            } => {
                if *train_len < 1 {
                    violations.push(format!("train_len must be >= 1, got {train_len}"));
                }
                if *val_len < 1 {
                    violations.push(format!("val_len must be >= 1, got {val_len}"));
                }
                if *stride < 1 {
                    violations.push(format!("stride must be >= 1, got {stride}"));
                }
            }
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::Plan(violations.join("; ")))
        }
    }

    fn splits_for(&self, series_length: usize) -> Vec<Split> {
        match *self {
            SplitPlan::FixedOrigin { train_frac } => {
                let boundary = (train_frac * series_length as f64).floor() as usize;
                if boundary >= 1 && boundary < series_length {
                    vec![Split {
                        train_start: 0,
                        train_end: boundary,
                        val_start: boundary,
                        val_end: series_length,
                    }]
                } else {
                    vec![]
                }
            }
            SplitPlan::RollingOrigin {
                num_splits,
                initial_frac,
                stride,
            } => {
                let origin = (initial_frac * series_length as f64).floor() as usize;
                if origin < 1 || origin >= series_length {
                    return vec![];
                }
                let stride = stride
                    .unwrap_or_else(|| ((series_length - origin) / num_splits).max(1))
                    .max(1);
                let mut splits = Vec::with_capacity(num_splits);
                for k in 0..num_splits {
                    let val_start = origin + k * stride;
                    let val_end = (val_start + stride).min(series_length);
                    if val_start >= series_length || val_end <= val_start {
                        return vec![]; // plan does not fit this series
                    }
                    splits.push(Split {
                        train_start: 0,
                        train_end: val_start,
                        val_start,
                        val_end,
                    });
                }
                splits
            }
            SplitPlan::RollingWindow {
                train_len,
                val_len,
                stride,
            } => {
                let mut splits = Vec::new();
                let mut origin = 0;
                while origin + train_len + val_len <= series_length {
                    splits.push(Split {
                        train_start: origin,
                        train_end: origin + train_len,
                        val_start: origin + train_len,
                        val_end: origin + train_len + val_len,
                    });
                    origin += stride;
                }
                splits
            }
        }
    }

    /// Smallest series length this plan can split (found by direct search;
    /// plan parameters are desk-scale so the search is cheap).
    pub fn min_series_length(&self) -> usize {
        (2..100_000)
            .find(|&n| !self.splits_for(n).is_empty())
            .unwrap_or(100_000)
    }

    pub fn describe(&self) -> String {
        match self {
            SplitPlan::FixedOrigin { train_frac } => format!("fixed_origin({train_frac})"),
            SplitPlan::RollingOrigin {
                num_splits,
                initial_frac,
                stride,
            } => match stride {
                Some(s) => format!("rolling_origin({num_splits}, {initial_frac}, stride {s})"),
                None => format!("rolling_origin({num_splits}, {initial_frac})"),
            },
            SplitPlan::RollingWindow {
                train_len,
                val_len,
                stride,
            } => format!("rolling_window({train_len}/{val_len}, stride {stride})"),
        }
    }
}

/// Expands a plan into concrete (train, validation) ranges. Every emitted
/// split has nonempty segments with the training range strictly before the
/// validation range.
pub fn plan_splits(plan: &SplitPlan, series_length: usize) -> Result<Vec<Split>> {
    plan.validate()?;
    let splits = plan.splits_for(series_length);
    if splits.is_empty() {
        return Err(Error::Plan(format!(
            "series of length {series_length} is too short for {}; minimum length is {}",
            plan.describe(),
            plan.min_series_length()
        )));
    }
    for s in &splits {
        debug_assert!(s.train_start < s.train_end);
        debug_assert!(s.train_end == s.val_start);
        debug_assert!(s.val_start < s.val_end);
    }
    Ok(splits)
}

fn sign(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

/// Fraction of predictions whose sign matches the realized value's sign.
/// Exact zeros count as a match only against another exact zero.
pub fn up_down_accuracy(predictions: &[f64], actuals: &[f64]) -> Result<f64> {
    if predictions.is_empty() || predictions.len() != actuals.len() {
        return Err(Error::Argument(format!(
            "up_down_accuracy needs equal nonempty lengths, got {} and {}",
            predictions.len(),
            actuals.len()
        )));
    }
    let correct = predictions
        .iter()
        .zip(actuals)
        .filter(|(p, a)| sign(**p) == sign(**a))
        .count();
    Ok(correct as f64 / predictions.len() as f64)
}

/// Directional accuracy restricted to confident predictions
/// (`|prediction| > threshold`). Returns the accuracy over qualifying
/// indices (absent when none qualify) and the qualifying count.
pub fn thresholded_accuracy(
    predictions: &[f64],
    actuals: &[f64],
    threshold: f64,
) -> Result<(Option<f64>, usize)> {
    if predictions.len() != actuals.len() {
        return Err(Error::Argument(format!(
            "thresholded_accuracy needs equal lengths, got {} and {}",
            predictions.len(),
            actuals.len()
        )));
    }
    if threshold < 0.0 || threshold.is_nan() {
        return Err(Error::Argument(format!(
            "threshold must be >= 0, got {threshold}"
        )));
    }
    let qualifying: Vec<(f64, f64)> = predictions
        .iter()
        .zip(actuals)
        .filter(|(p, _)| p.abs() > threshold)
        .map(|(&p, &a)| (p, a))
        .collect();
    if qualifying.is_empty() {
        return Ok((None, 0));
    }
    let correct = qualifying.iter().filter(|(p, a)| sign(*p) == sign(*a)).count();
    Ok((Some(correct as f64 / qualifying.len() as f64), qualifying.len()))
}

/// Results from one split of an evaluation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitResult {
    pub split_index: usize,
    pub split: Split,
    /// Validation MSE in scaled space.
    pub val_loss: f64,
    /// Directional accuracy on unscaled returns.
    pub up_down_accuracy: f64,
    pub n_predictions: usize,
    /// Attention weights of the first validation prediction (attention
    /// variant only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub attention_weights_sample: Option<Vec<f64>>,
}

/// Aggregated metrics: arithmetic means over splits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub mean_val_loss: f64,
    pub mean_up_down_accuracy: f64,
}

/// Full evaluation report: config and plan echo, per-split results, and
/// aggregates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub series_name: String,
    pub config: ModelConfig,
    pub train_config: TrainConfig,
    pub plan: SplitPlan,
    pub splits: Vec<SplitResult>,
    pub aggregate: Aggregate,
}

impl EvalReport {
    /// Flat CSV for tabulation: one row per split plus an aggregate row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("split,val_loss,up_down_accuracy,n_predictions\n");
        for s in &self.splits {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                s.split_index, s.val_loss, s.up_down_accuracy, s.n_predictions
            );
        }
        let total: usize = self.splits.iter().map(|s| s.n_predictions).sum();
        let _ = writeln!(
            out,
            "mean,{},{},{}",
            self.aggregate.mean_val_loss, self.aggregate.mean_up_down_accuracy, total
        );
        out
    }
}

/// Per-split data preparation: returns over the split's contiguous
/// train+validation block, scaler fitted on the training returns only, and
/// windows partitioned by whether their target falls in the training or
/// validation region.
pub fn split_windows(
    series: &PriceSeries,
    split: &Split,
    lag: usize,
) -> Result<(Scaler, WindowSet, WindowSet)> {
    let closes = &series.closes[split.train_start..split.val_end];
    let returns = data::returns_of(closes)?;
    // Return i is realized at price index train_start + i + 1; training
    // returns are those realized strictly before val_start.
    let n_train_returns = split.train_end - split.train_start - 1;
    if n_train_returns < lag + 1 {
        return Err(Error::Plan(format!(
            "training segment [{}, {}) yields {} returns; lag {} needs at least {} (train length >= {})",
            split.train_start,
            split.train_end,
            n_train_returns,
            lag,
            lag + 1,
            lag + 2
        )));
    }
    let scaler = Scaler::fit(&returns[..n_train_returns])?;
    let scaled = scaler.transform_all(&returns);
    let all_windows = data::make_windows(&scaled, lag)?;
    let train = all_windows.filter_by_origin(|origin| origin < n_train_returns);
    let val = all_windows.filter_by_origin(|origin| origin >= n_train_returns);
    if val.is_empty() {
        return Err(Error::Plan(format!(
            "validation segment [{}, {}) yields no predictions",
            split.val_start, split.val_end
        )));
    }
    Ok((scaler, train, val))
}

fn run_split(
    index: usize,
    split: &Split,
    series: &PriceSeries,
    config: &ModelConfig,
    train_cfg: &TrainConfig,
) -> Result<SplitResult> {
    let (scaler, train_ws, val_ws) = split_windows(series, split, config.lag)?;

    // Fresh model and independent seed streams per split.
    let mut split_config = config.clone();
    split_config.seed = derive_seed(config.seed, index as u64);
    let mut split_train = train_cfg.clone();
    split_train.seed = derive_seed(train_cfg.seed, 1_000 + index as u64);

    let mut model = Model::build(split_config)?;
    training::fit(&mut model, &train_ws, &val_ws, &split_train)?;

    let mut predictions = Vec::with_capacity(val_ws.len());
    let mut attention_sample = None;
    for (i, window) in val_ws.windows.iter().enumerate() {
        let pred = model.predict(window)?;
        if i == 0 {
            attention_sample = pred.attention_weights.clone();
        }
        predictions.push(pred.value);
    }
    let val_loss = training::mse(&predictions, &val_ws.targets)?;

    // Directional skill lives in return space; invert the scaler first.
    let predicted_returns: Vec<f64> = predictions.iter().map(|&p| scaler.inverse(p)).collect();
    let actual_returns: Vec<f64> = val_ws.targets.iter().map(|&t| scaler.inverse(t)).collect();
    let accuracy = up_down_accuracy(&predicted_returns, &actual_returns)?;

    Ok(SplitResult {
        split_index: index,
        split: *split,
        val_loss,
        up_down_accuracy: accuracy,
        n_predictions: val_ws.len(),
        attention_weights_sample: attention_sample,
    })
}

/// Runs the full plan: per split, fit the scaler on training returns, train
/// a fresh model, and score single-step validation predictions; then
/// aggregate. Splits run in parallel; results are collected in split order,
/// so reports are identical regardless of worker count.
pub fn evaluate(
    config: &ModelConfig,
    train_cfg: &TrainConfig,
    series: &PriceSeries,
    plan: &SplitPlan,
) -> Result<EvalReport> {
    config.validate()?;
    train_cfg.validate()?;
    let splits = plan_splits(plan, series.len())?;

    let results: Vec<SplitResult> = splits
        .par_iter()
        .enumerate()
        .map(|(index, split)| {
            run_split(index, split, series, config, train_cfg)
                .map_err(|e| Error::Plan(format!("split {index} failed: {e}")))
        })
        .collect::<Result<Vec<_>>>()?;

    let n = results.len() as f64;
    let aggregate = Aggregate {
        mean_val_loss: results.iter().map(|r| r.val_loss).sum::<f64>() / n,
        mean_up_down_accuracy: results.iter().map(|r| r.up_down_accuracy).sum::<f64>() / n,
    };
    Ok(EvalReport {
        series_name: series.name.clone(),
        config: config.clone(),
        train_config: train_cfg.clone(),
        plan: plan.clone(),
        splits: results,
        aggregate,
    })
}

/// Mean and a 95% normal-approximation confidence interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanWithCi {
    pub mean: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

fn mean_with_ci(values: &[f64]) -> MeanWithCi {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    let half_width = 1.96 * (var / n).sqrt();
    MeanWithCi {
        mean,
        ci_low: mean - half_width,
        ci_high: mean + half_width,
    }
}

/// One variant's aggregated performance over a set of runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantSummary {
    pub variant: Variant,
    pub loss: MeanWithCi,
    pub accuracy: MeanWithCi,
    pub n_runs: usize,
}

/// Side-by-side comparison of both variants over the same series set, with
/// the winner flagged (higher mean accuracy; ties broken by lower loss).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub plain: VariantSummary,
    pub attention: VariantSummary,
    pub winner: Variant,
}

impl ComparisonReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "variant,mean_loss,loss_ci_low,loss_ci_high,mean_accuracy,accuracy_ci_low,accuracy_ci_high,n_runs,winner\n",
        );
        for summary in [&self.plain, &self.attention] {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                summary.variant,
                summary.loss.mean,
                summary.loss.ci_low,
                summary.loss.ci_high,
                summary.accuracy.mean,
                summary.accuracy.ci_low,
                summary.accuracy.ci_high,
                summary.n_runs,
                self.winner == summary.variant
            );
        }
        out
    }
}

/// Evaluates both variants on every series and aggregates per variant.
/// `configs` supplies the hyperparameters for each variant; the per-series
/// model seed is derived from the config seed and the series index.
pub fn compare_variants(
    plain_config: &ModelConfig,
    attention_config: &ModelConfig,
    series_set: &[PriceSeries],
    plan: &SplitPlan,
) -> Result<ComparisonReport> {
    if plain_config.variant != Variant::Plain || attention_config.variant != Variant::Attention {
        return Err(Error::Config(
            "compare_variants needs one plain and one attention config".into(),
        ));
    }
    if series_set.is_empty() {
        return Err(Error::Argument("compare_variants needs at least one series".into()));
    }
    let summarize = |config: &ModelConfig| -> Result<VariantSummary> {
        let train_cfg = TrainConfig::default_for(config.variant);
        let runs: Vec<(f64, f64)> = series_set
            .par_iter()
            .enumerate()
            .map(|(i, series)| {
                let mut cfg = config.clone();
                cfg.seed = derive_seed(config.seed, i as u64);
                let mut tc = train_cfg.clone();
                tc.seed = derive_seed(config.seed, 500 + i as u64);
                let report = evaluate(&cfg, &tc, series, plan)?;
                Ok((report.aggregate.mean_val_loss, report.aggregate.mean_up_down_accuracy))
            })
            .collect::<Result<Vec<_>>>()?;
        let losses: Vec<f64> = runs.iter().map(|r| r.0).collect();
        let accuracies: Vec<f64> = runs.iter().map(|r| r.1).collect();
        Ok(VariantSummary {
            variant: config.variant,
            loss: mean_with_ci(&losses),
            accuracy: mean_with_ci(&accuracies),
            n_runs: runs.len(),
        })
    };
    let plain = summarize(plain_config)?;
    let attention = summarize(attention_config)?;
    let winner = if attention.accuracy.mean > plain.accuracy.mean
        || (attention.accuracy.mean == plain.accuracy.mean
            && attention.loss.mean < plain.loss.mean)
    {
        Variant::Attention
    } else {
        Variant::Plain
    };
    Ok(ComparisonReport {
        plain,
        attention,
        winner,
    })
}
