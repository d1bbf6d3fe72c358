//! MSE loss, the Adam optimizer, and the epoch loop.
//!
//! Loss reporting follows the convention of batch-trained frameworks: the
//! per-epoch training loss is the average per-sample squared error across
//! the epoch's mini-batches (so early epochs can report a training loss
//! above the validation loss, which is computed once with the final
//! parameters). There is no early stopping; overfitting is managed by
//! per-variant epoch caps (100 plain, 25 attention).
//!
//! Gradients are clipped by global norm before every optimizer step as a
//! guard against rare exploding-gradient batches.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::data::WindowSet;
use crate::error::{Error, Result};
use crate::model::{Model, ModelGrads, Variant};
use crate::numeric::Matrix;
use crate::rng::SeededRng;

/// Global-norm gradient clipping threshold.
pub const GRAD_CLIP_NORM: f64 = 5.0;

/// Mean squared error: `(1/n) sum (y - t)^2`.
pub fn mse(predictions: &[f64], targets: &[f64]) -> Result<f64> {
    if predictions.is_empty() || predictions.len() != targets.len() {
        return Err(Error::Argument(format!(
            "mse needs equal nonempty lengths, got {} predictions and {} targets",
            predictions.len(),
            targets.len()
        )));
    }
    let total: f64 = predictions
        .iter()
        .zip(targets)
        .map(|(y, t)| (y - t).powi(2))
        .sum();
    Ok(total / predictions.len() as f64)
}

/// Adam optimizer state: first/second moment estimates per parameter matrix
/// plus the step counter used for bias correction.
#[derive(Debug, Clone)]
pub struct AdamState {
    m: Vec<Matrix>,
    v: Vec<Matrix>,
    t: u64,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl AdamState {
    /// Zero-moment state shaped like the given parameter matrices, with the
    /// standard hyperparameters (lr 0.001, beta1 0.9, beta2 0.999, eps 1e-8).
    pub fn new(param_shapes: &[&Matrix]) -> AdamState {
        AdamState {
            m: param_shapes.iter().map(|p| Matrix::zeros(p.rows(), p.cols())).collect(),
            v: param_shapes.iter().map(|p| Matrix::zeros(p.rows(), p.cols())).collect(),
            t: 0,
            learning_rate: 0.001,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }

    pub fn for_model(model: &Model) -> AdamState {
        AdamState::new(&model.param_views())
    }

    pub fn step_count(&self) -> u64 {
        self.t
    }

    /// One Adam update, in place:
    /// `m <- b1 m + (1-b1) g`, `v <- b2 v + (1-b2) g^2`, bias-corrected
    /// `m^ = m / (1-b1^t)`, `v^ = v / (1-b2^t)`,
    /// `theta <- theta - lr m^ / (sqrt(v^) + eps)`.
    pub fn step(&mut self, params: &mut [&mut Matrix], grads: &[&Matrix]) -> Result<()> {
        if params.len() != self.m.len() || grads.len() != self.m.len() {
            return Err(Error::Shape {
                op: "adam_step",
                lhs: format!("{} params / {} grads", params.len(), grads.len()),
                rhs: format!("{} moment slots", self.m.len()),
            });
        }
        for ((param, grad), slot) in params.iter().zip(grads).zip(0..self.m.len()) {
            if param.shape() != self.m[slot].shape() || grad.shape() != self.m[slot].shape() {
                return Err(Error::shape("adam_step", param.shape(), self.m[slot].shape()));
            }
        }
        self.t += 1;
        let bias1 = 1.0 - self.beta1.powi(self.t as i32);
        let bias2 = 1.0 - self.beta2.powi(self.t as i32);
        for ((param, grad), slot) in params.iter_mut().zip(grads).zip(0..self.m.len()) {
            let m = self.m[slot].data_mut();
            for (mi, &g) in m.iter_mut().zip(grad.data()) {
                *mi = self.beta1 * *mi + (1.0 - self.beta1) * g;
            }
            let v = self.v[slot].data_mut();
            for (vi, &g) in v.iter_mut().zip(grad.data()) {
                *vi = self.beta2 * *vi + (1.0 - self.beta2) * g * g;
            }
            let theta = param.data_mut();
            for ((p, &mi), &vi) in theta
                .iter_mut()
                .zip(self.m[slot].data())
                .zip(self.v[slot].data())
            {
                let m_hat = mi / bias1;
                let v_hat = vi / bias2;
                *p -= self.learning_rate * m_hat / (v_hat.sqrt() + self.epsilon);
            }
        }
        Ok(())
    }
}

fn default_batch_size() -> usize {
    32
}

fn default_shuffle() -> bool {
    true
}

/// Training-loop configuration. `max_epochs` defaults per variant via
/// [`TrainConfig::default_for`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainConfig {
    pub max_epochs: usize,
    #[serde(default = "default_batch_size")]
    pub batch_size: usize,
    #[serde(default = "default_shuffle")]
    pub shuffle_each_epoch: bool,
    #[serde(default)]
    pub seed: u64,
}

impl TrainConfig {
    /// Per-variant default epoch caps: 100 for plain, 25 for attention.
    pub fn default_for(variant: Variant) -> TrainConfig {
        TrainConfig {
            max_epochs: match variant {
                Variant::Plain => 100,
                Variant::Attention => 25,
            },
            batch_size: default_batch_size(),
            shuffle_each_epoch: true,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut violations = Vec::new();
        if self.max_epochs < 1 {
            violations.push(format!("max_epochs must be >= 1, got {}", self.max_epochs));
        }
        if self.batch_size < 1 {
            violations.push(format!("batch_size must be >= 1, got {}", self.batch_size));
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(violations.join("; ")))
        }
    }
}

/// One epoch's recorded losses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochLoss {
    pub epoch: usize,
    /// Average per-sample squared error across the epoch's batches.
    pub train_loss: f64,
    /// Full validation-set MSE with the end-of-epoch parameters.
    pub val_loss: f64,
}

/// Per-epoch loss trace of one training run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LossHistory {
    pub epochs: Vec<EpochLoss>,
}

impl LossHistory {
    pub fn len(&self) -> usize {
        self.epochs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.epochs.is_empty()
    }

    pub fn final_epoch(&self) -> Option<&EpochLoss> {
        self.epochs.last()
    }

    /// CSV serialization: `epoch,train_loss,val_loss`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("epoch,train_loss,val_loss\n");
        for e in &self.epochs {
            let _ = writeln!(out, "{},{},{}", e.epoch, e.train_loss, e.val_loss);
        }
        out
    }
}

/// Full-set MSE of inference-mode predictions.
pub fn evaluate_loss(model: &Model, data: &WindowSet) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::Argument("cannot evaluate on empty window set".into()));
    }
    let predictions = data
        .windows
        .iter()
        .map(|w| Ok(model.predict(w)?.value))
        .collect::<Result<Vec<f64>>>()?;
    mse(&predictions, &data.targets)
}

/// Scales gradients in place so their global norm is at most
/// [`GRAD_CLIP_NORM`].
fn clip_gradients(grads: &mut ModelGrads) {
    let mut total = 0.0;
    for g in grads.views() {
        total += g.sum_squares();
    }
    let norm = total.sqrt();
    if norm > GRAD_CLIP_NORM {
        let factor = GRAD_CLIP_NORM / norm;
        for gate in grads.encoder.gates_mut() {
            for m in [&mut gate.w, &mut gate.u, &mut gate.b] {
                for x in m.data_mut() {
                    *x *= factor;
                }
            }
        }
        if let Some(att) = &mut grads.attention {
            for m in [&mut att.state_proj, &mut att.annot_proj, &mut att.score_vec] {
                for x in m.data_mut() {
                    *x *= factor;
                }
            }
        }
        for x in grads.output_w.data_mut() {
            *x *= factor;
        }
        for x in grads.output_b.data_mut() {
            *x *= factor;
        }
    }
}

/// One pass over the training windows in shuffled mini-batches; parameters
/// are updated in place. Returns the epoch's average per-sample loss.
pub fn train_epoch(
    model: &mut Model,
    data: &WindowSet,
    adam: &mut AdamState,
    cfg: &TrainConfig,
    rng: &mut SeededRng,
) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::Argument("cannot train on empty window set".into()));
    }
    cfg.validate()?;

    let mut order: Vec<usize> = (0..data.len()).collect();
    if cfg.shuffle_each_epoch {
        rng.shuffle(&mut order);
    }

    let mut total_sq_error = 0.0;
    for batch in order.chunks(cfg.batch_size) {
        let batch_len = batch.len() as f64;
        let mut grads = ModelGrads::zeros_like(model);
        for &idx in batch {
            let (pred, cache) = model.forward_train(&data.windows[idx], rng)?;
            let residual = pred.value - data.targets[idx];
            total_sq_error += residual * residual;
            // d/dy of the batch-mean squared error.
            let upstream = 2.0 * residual / batch_len;
            let sample_grads = model.backward(&cache, upstream)?;
            grads.add_assign(&sample_grads)?;
        }
        clip_gradients(&mut grads);
        let grad_views = grads.views();
        let mut param_views = model.param_views_mut();
        adam.step(&mut param_views, &grad_views)?;
    }
    Ok(total_sq_error / data.len() as f64)
}

/// Trains for up to `cfg.max_epochs` epochs, recording train/validation
/// losses per epoch. The model is left at its final-epoch parameters; there
/// is no early stopping.
pub fn fit(
    model: &mut Model,
    train: &WindowSet,
    val: &WindowSet,
    cfg: &TrainConfig,
) -> Result<LossHistory> {
    if train.is_empty() || val.is_empty() {
        return Err(Error::Argument(
            "fit requires nonempty training and validation sets".into(),
        ));
    }
    cfg.validate()?;
    let mut adam = AdamState::for_model(model);
    let mut rng = SeededRng::new(cfg.seed);
    let mut history = LossHistory::default();
    for epoch in 1..=cfg.max_epochs {
        let train_loss = train_epoch(model, train, &mut adam, cfg, &mut rng)?;
        let val_loss = evaluate_loss(model, val)?;
        history.epochs.push(EpochLoss {
            epoch,
            train_loss,
            val_loss,
        });
    }
    Ok(history)
}
