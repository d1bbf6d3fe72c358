//! Window-to-scalar forecasting models.
//!
//! Two variants share one encoder and one tanh-bounded output head:
//!
//! * `Plain`: LSTM encoder; the prediction is `tanh(w h_T + b)` on the
//!   final hidden state.
//! * `Attention`: the final hidden state seeds a single decoder step
//!   `s_0 = h_T`; additive attention over all annotations produces a
//!   context vector `c`, and the prediction is `tanh(w [s_0 ; c] + b)`.
//!   Concatenating `s_0` lets the head fall back to plain-LSTM behavior
//!   when attention is uninformative.
//!
//! Inverted dropout is applied only in training mode, to the encoder's
//! input connections (a fresh mask per timestep) and to the output-layer
//! input. Recurrent connections are never dropped.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::attention::{self, AttentionParams};
use crate::error::{Error, Result};
use crate::lstm::{self, BpttCache, LstmParams};
use crate::numeric::Matrix;
use crate::rng::SeededRng;

/// Which architecture a config builds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Plain,
    Attention,
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Variant::Plain => write!(f, "plain"),
            Variant::Attention => write!(f, "attention"),
        }
    }
}

fn default_input_dim() -> usize {
    1
}

/// Hyperparameters of one model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub variant: Variant,
    /// Hidden units in the encoder.
    pub size: usize,
    /// Window length in timesteps.
    pub lag: usize,
    /// Dropout rate in [0, 1).
    pub dropout: f64,
    /// Features per timestep (returns only, so 1 unless stated otherwise).
    #[serde(default = "default_input_dim")]
    pub input_dim: usize,
    /// Seed for parameter initialization.
    #[serde(default)]
    pub seed: u64,
}

impl ModelConfig {
    /// Checks every invariant and reports all violations at once.
    pub fn validate(&self) -> Result<()> {
        let mut violations = Vec::new();
        if self.size < 1 {
            violations.push(format!("size must be >= 1, got {}", self.size));
        }
        if self.lag < 2 {
            violations.push(format!("lag must be >= 2, got {}", self.lag));
        }
        if !(0.0..1.0).contains(&self.dropout) {
            violations.push(format!("dropout must be in [0, 1), got {}", self.dropout));
        }
        if self.input_dim < 1 {
            violations.push(format!("input_dim must be >= 1, got {}", self.input_dim));
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(violations.join("; ")))
        }
    }
}

/// Prediction mode. Dropout fires only in `Train`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Train,
    Infer,
}

/// A built model: config echo plus all parameter matrices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Model {
    pub config: ModelConfig,
    pub encoder: LstmParams,
    /// Present only for the `Attention` variant.
    pub attention: Option<AttentionParams>,
    /// 1 x d output weights, d = size (plain) or 2*size (attention).
    pub output_w: Matrix,
    /// 1 x 1 output bias.
    pub output_b: Matrix,
}

/// One prediction. `attention_weights` is populated for the attention
/// variant (diagnostic output; one weight per window timestep).
#[derive(Debug, Clone)]
pub struct Prediction {
    pub value: f64,
    pub attention_weights: Option<Vec<f64>>,
}

/// Intermediate values retained by a training-mode forward pass.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    bptt: BpttCache,
    annotations: Vec<Matrix>,
    /// Output-layer input after dropout.
    head_input: Matrix,
    /// Dropout mask applied to the output-layer input (all ones when inactive).
    head_mask: Matrix,
    prediction: f64,
}

impl ForwardCache {
    pub fn prediction(&self) -> f64 {
        self.prediction
    }
}

/// Gradients for every parameter in a [`Model`], with identical layout.
#[derive(Debug, Clone)]
pub struct ModelGrads {
    pub encoder: LstmParams,
    pub attention: Option<AttentionParams>,
    pub output_w: Matrix,
    pub output_b: Matrix,
}

impl ModelGrads {
    pub fn zeros_like(model: &Model) -> Self {
        ModelGrads {
            encoder: LstmParams::zeros(model.config.size, model.config.input_dim),
            attention: model
                .attention
                .as_ref()
                .map(|a| AttentionParams::zeros(a.attn_dim, model.config.size)),
            output_w: Matrix::zeros(1, model.output_w.cols()),
            output_b: Matrix::zeros(1, 1),
        }
    }

    pub fn add_assign(&mut self, other: &ModelGrads) -> Result<()> {
        for (mine, theirs) in self
            .encoder
            .gates_mut()
            .into_iter()
            .zip(other.encoder.gates())
        {
            mine.w.add_assign(&theirs.w)?;
            mine.u.add_assign(&theirs.u)?;
            mine.b.add_assign(&theirs.b)?;
        }
        match (&mut self.attention, &other.attention) {
            (Some(a), Some(b)) => {
                a.state_proj.add_assign(&b.state_proj)?;
                a.annot_proj.add_assign(&b.annot_proj)?;
                a.score_vec.add_assign(&b.score_vec)?;
            }
            (None, None) => {}
            _ => {
                return Err(Error::Argument(
                    "cannot accumulate gradients across model variants".into(),
                ))
            }
        }
        self.output_w.add_assign(&other.output_w)?;
        self.output_b.add_assign(&other.output_b)?;
        Ok(())
    }

    /// Gradient matrices in canonical parameter order (matches
    /// [`Model::param_views_mut`]).
    pub fn views(&self) -> Vec<&Matrix> {
        let mut views = Vec::new();
        for gate in self.encoder.gates() {
            views.push(&gate.w);
            views.push(&gate.u);
            views.push(&gate.b);
        }
        if let Some(att) = &self.attention {
            views.push(&att.state_proj);
            views.push(&att.annot_proj);
            views.push(&att.score_vec);
        }
        views.push(&self.output_w);
        views.push(&self.output_b);
        views
    }
}

/// Inverted dropout: each entry is zeroed with probability `rate` and the
/// survivors are scaled by `1 / (1 - rate)`, so the expected activation is
/// unchanged. `rate = 0` is the identity.
pub fn apply_dropout(activations: &Matrix, rate: f64, rng: &mut SeededRng) -> Matrix {
    activations
        .hadamard(&dropout_mask(activations.rows(), activations.cols(), rate, rng))
        .expect("mask shape matches by construction")
}

/// Mask of inverted-dropout factors: 0 with probability `rate`, otherwise
/// `1 / (1 - rate)`.
fn dropout_mask(rows: usize, cols: usize, rate: f64, rng: &mut SeededRng) -> Matrix {
    assert!((0.0..1.0).contains(&rate), "dropout rate must be in [0, 1)");
    if rate == 0.0 {
        return Matrix::zeros(rows, cols).map(|_| 1.0);
    }
    let keep = 1.0 / (1.0 - rate);
    let data = (0..rows * cols)
        .map(|_| if rng.next_f64() < rate { 0.0 } else { keep })
        .collect();
    Matrix::from_vec(rows, cols, data).expect("mask dimensions are consistent")
}

impl Model {
    /// Builds a deterministically initialized model from a validated config.
    pub fn build(config: ModelConfig) -> Result<Model> {
        config.validate()?;
        let mut rng = SeededRng::new(config.seed);
        let encoder = LstmParams::init(config.size, config.input_dim, &mut rng);
        let attention = match config.variant {
            Variant::Plain => None,
            // Alignment width defaults to the encoder size.
            Variant::Attention => Some(AttentionParams::init(config.size, config.size, &mut rng)),
        };
        let head_dim = match config.variant {
            Variant::Plain => config.size,
            Variant::Attention => 2 * config.size,
        };
        let output_w = crate::numeric::xavier_init(1, head_dim, &mut rng);
        let output_b = Matrix::zeros(1, 1);
        Ok(Model {
            config,
            encoder,
            attention,
            output_w,
            output_b,
        })
    }

    /// Total learnable scalars across encoder, attention, and output head.
    pub fn param_count(&self) -> usize {
        self.encoder.param_count()
            + self.attention.as_ref().map_or(0, |a| a.param_count())
            + self.output_w.cols()
            + 1
    }

    fn check_window(&self, window: &Matrix) -> Result<()> {
        if window.shape() != (self.config.lag, self.config.input_dim) {
            return Err(Error::shape(
                "model window",
                window.shape(),
                (self.config.lag, self.config.input_dim),
            ));
        }
        Ok(())
    }

    fn forward_inner(
        &self,
        window: &Matrix,
        mode: Mode,
        rng: Option<&mut SeededRng>,
    ) -> Result<(Prediction, ForwardCache)> {
        self.check_window(window)?;
        let dropout_active = mode == Mode::Train && self.config.dropout > 0.0;
        let mut rng = rng;

        let mut inputs = Vec::with_capacity(self.config.lag);
        for t in 0..self.config.lag {
            let x = window.row_as_column(t);
            if dropout_active {
                let r = rng
                    .as_mut()
                    .ok_or_else(|| Error::Argument("training forward requires an rng".into()))?;
                let mask = dropout_mask(self.config.input_dim, 1, self.config.dropout, r);
                inputs.push(x.hadamard(&mask)?);
            } else {
                inputs.push(x);
            }
        }

        let (annotations, final_state, bptt) = lstm::encode_sequence(&self.encoder, &inputs)?;

        let (head_raw, attention_result) = match (&self.config.variant, &self.attention) {
            (Variant::Plain, _) => (final_state.h.clone(), None),
            (Variant::Attention, Some(att_params)) => {
                // Decoder state for the single prediction step is the final
                // encoder hidden state.
                let result = attention::attend(att_params, &final_state.h, &annotations)?;
                (final_state.h.vstack(&result.context)?, Some(result))
            }
            (Variant::Attention, None) => {
                return Err(Error::Config("attention variant without attention parameters".into()))
            }
        };

        let head_mask = if dropout_active {
            let r = rng
                .as_mut()
                .ok_or_else(|| Error::Argument("training forward requires an rng".into()))?;
            dropout_mask(head_raw.rows(), 1, self.config.dropout, r)
        } else {
            Matrix::zeros(head_raw.rows(), 1).map(|_| 1.0)
        };
        let head_input = head_raw.hadamard(&head_mask)?;

        let pre = self.output_w.matmul(&head_input)?.get(0, 0) + self.output_b.get(0, 0);
        let value = pre.tanh();

        let prediction = Prediction {
            value,
            attention_weights: attention_result.as_ref().map(|r| r.weights.clone()),
        };
        let cache = ForwardCache {
            bptt,
            annotations,
            head_input,
            head_mask,
            prediction: value,
        };
        Ok((prediction, cache))
    }

    /// Inference-mode prediction: deterministic, no dropout. The value is
    /// always in [-1, 1].
    pub fn predict(&self, window: &Matrix) -> Result<Prediction> {
        Ok(self.forward_inner(window, Mode::Infer, None)?.0)
    }

    /// Training-mode forward pass: applies dropout and retains the cache
    /// consumed by [`Model::backward`].
    pub fn forward_train(
        &self,
        window: &Matrix,
        rng: &mut SeededRng,
    ) -> Result<(Prediction, ForwardCache)> {
        self.forward_inner(window, Mode::Train, Some(rng))
    }

    /// Exact gradients of `upstream * prediction` with respect to every
    /// parameter, where `upstream` is the loss gradient at the prediction
    /// (e.g. `2 (y - target) / n` for batch MSE).
    pub fn backward(&self, cache: &ForwardCache, upstream: f64) -> Result<ModelGrads> {
        // Through the output tanh.
        let d_pre = upstream * (1.0 - cache.prediction * cache.prediction);
        let output_w_grad = cache.head_input.transpose().scale(d_pre);
        let output_b_grad = Matrix::from_vec(1, 1, vec![d_pre])?;
        // Through the head, then the dropout mask.
        let d_head = self.output_w.transpose().scale(d_pre).hadamard(&cache.head_mask)?;

        let size = self.config.size;
        let lag = self.config.lag;
        let mut grad_annotations = vec![Matrix::zeros(size, 1); lag];
        let mut attention_grads = None;

        match self.config.variant {
            Variant::Plain => {
                grad_annotations[lag - 1].add_assign(&d_head)?;
            }
            Variant::Attention => {
                let att_params = self
                    .attention
                    .as_ref()
                    .ok_or_else(|| Error::Config("attention variant without attention parameters".into()))?;
                let d_state_direct = d_head.row_slice(0, size);
                let d_context = d_head.row_slice(size, 2 * size);
                let s0 = &cache.annotations[lag - 1];
                let (att_g, d_state_att, d_annotations) =
                    attention::attention_backward(att_params, s0, &cache.annotations, &d_context)?;
                for (dst, src) in grad_annotations.iter_mut().zip(&d_annotations) {
                    dst.add_assign(src)?;
                }
                grad_annotations[lag - 1].add_assign(&d_state_direct)?;
                grad_annotations[lag - 1].add_assign(&d_state_att)?;
                attention_grads = Some(att_g);
            }
        }

        let (encoder_grads, _input_grads) =
            lstm::lstm_backward(&self.encoder, &cache.bptt, &grad_annotations)?;

        Ok(ModelGrads {
            encoder: encoder_grads,
            attention: attention_grads,
            output_w: output_w_grad,
            output_b: output_b_grad,
        })
    }

    /// Mutable references to every parameter matrix in canonical order
    /// (encoder gates i/f/o/g as w,u,b; attention projections; output head).
    pub fn param_views_mut(&mut self) -> Vec<&mut Matrix> {
        let mut views = Vec::new();
        for gate in self.encoder.gates_mut() {
            views.push(&mut gate.w);
            views.push(&mut gate.u);
            views.push(&mut gate.b);
        }
        if let Some(att) = &mut self.attention {
            views.push(&mut att.state_proj);
            views.push(&mut att.annot_proj);
            views.push(&mut att.score_vec);
        }
        views.push(&mut self.output_w);
        views.push(&mut self.output_b);
        views
    }

    pub fn param_views(&self) -> Vec<&Matrix> {
        let mut views = Vec::new();
        for gate in self.encoder.gates() {
            views.push(&gate.w);
            views.push(&gate.u);
            views.push(&gate.b);
        }
        if let Some(att) = &self.attention {
            views.push(&att.state_proj);
            views.push(&att.annot_proj);
            views.push(&att.score_vec);
        }
        views.push(&self.output_w);
        views.push(&self.output_b);
        views
    }

    /// Writes a versioned JSON checkpoint. Floats use the shortest exact
    /// decimal form, so save/load round-trips are bit-lossless.
    pub fn save(&self, writer: impl Write) -> Result<()> {
        let checkpoint = Checkpoint {
            schema_version: CHECKPOINT_VERSION,
            model: self.clone(),
        };
        serde_json::to_writer_pretty(writer, &checkpoint)?;
        Ok(())
    }

    pub fn save_to_path(&self, path: impl AsRef<Path>) -> Result<()> {
        self.save(std::io::BufWriter::new(std::fs::File::create(path)?))
    }

    pub fn load(reader: impl Read) -> Result<Model> {
        let checkpoint: Checkpoint = serde_json::from_reader(reader)?;
        if checkpoint.schema_version != CHECKPOINT_VERSION {
            return Err(Error::Data(format!(
                "unsupported checkpoint schema_version {} (expected {})",
                checkpoint.schema_version, CHECKPOINT_VERSION
            )));
        }
        checkpoint.model.config.validate()?;
        Ok(checkpoint.model)
    }

    pub fn load_from_path(path: impl AsRef<Path>) -> Result<Model> {
        Model::load(std::io::BufReader::new(std::fs::File::open(path)?))
    }
}

const CHECKPOINT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Checkpoint {
    schema_version: u32,
    #[serde(flatten)]
    model: Model,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{finite_diff_grad, relative_error};
    use crate::rng::derive_seed;

    fn config(variant: Variant, size: usize, lag: usize, seed: u64) -> ModelConfig {
        ModelConfig {
            variant,
            size,
            lag,
            dropout: 0.0,
            input_dim: 1,
            seed,
        }
    }

    fn random_window(lag: usize, input_dim: usize, seed: u64) -> Matrix {
        let mut rng = SeededRng::new(derive_seed(seed, 5));
        let data = (0..lag * input_dim).map(|_| rng.uniform(-1.0, 1.0)).collect();
        Matrix::from_vec(lag, input_dim, data).unwrap()
    }

    #[test]
    fn build_is_deterministic() {
        let a = Model::build(config(Variant::Attention, 8, 4, 3)).unwrap();
        let b = Model::build(config(Variant::Attention, 8, 4, 3)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn plain_variant_has_no_attention_params() {
        let m = Model::build(config(Variant::Plain, 64, 5, 0)).unwrap();
        assert!(m.attention.is_none());
        assert_eq!(m.output_w.cols(), 64);
    }

    #[test]
    fn attention_param_count_hand_computed() {
        // LSTM 4*(16 + 256 + 16) = 1152, attention 16*16 + 16*16 + 16 = 528,
        // head 2*16 + 1 = 33; total 1713.
        let m = Model::build(config(Variant::Attention, 16, 5, 0)).unwrap();
        assert_eq!(m.param_count(), 1713);
    }

    #[test]
    fn invalid_config_lists_every_violation() {
        let bad = ModelConfig {
            variant: Variant::Plain,
            size: 0,
            lag: 1,
            dropout: 1.5,
            input_dim: 0,
            seed: 0,
        };
        let msg = Model::build(bad).unwrap_err().to_string();
        assert!(msg.contains("size"), "{msg}");
        assert!(msg.contains("lag"), "{msg}");
        assert!(msg.contains("dropout"), "{msg}");
        assert!(msg.contains("input_dim"), "{msg}");
    }

    #[test]
    fn zero_parameters_predict_zero() {
        for variant in [Variant::Plain, Variant::Attention] {
            let mut m = Model::build(config(variant, 4, 3, 1)).unwrap();
            m.encoder = LstmParams::zeros(4, 1);
            if let Some(att) = &mut m.attention {
                *att = AttentionParams::zeros(4, 4);
            }
            m.output_w = Matrix::zeros(1, m.output_w.cols());
            m.output_b = Matrix::zeros(1, 1);
            let pred = m.predict(&random_window(3, 1, 9)).unwrap();
            assert_eq!(pred.value, 0.0);
        }
    }

    #[test]
    fn inference_is_deterministic() {
        let m = Model::build(config(Variant::Attention, 6, 4, 11)).unwrap();
        let window = random_window(4, 1, 2);
        let a = m.predict(&window).unwrap();
        let b = m.predict(&window).unwrap();
        assert_eq!(a.value, b.value);
        assert_eq!(a.attention_weights, b.attention_weights);
    }

    #[test]
    fn predictions_stay_bounded() {
        let m = Model::build(config(Variant::Plain, 5, 6, 21)).unwrap();
        for seed in 0..50 {
            let window = random_window(6, 1, seed).scale(100.0);
            let pred = m.predict(&window).unwrap();
            assert!(pred.value.abs() <= 1.0);
        }
    }

    #[test]
    fn window_shape_is_checked() {
        let m = Model::build(config(Variant::Plain, 4, 5, 0)).unwrap();
        let err = m.predict(&random_window(4, 1, 0)).unwrap_err();
        assert!(matches!(err, Error::Shape { .. }));
    }

    #[test]
    fn attention_weights_are_emitted_per_timestep() {
        let m = Model::build(config(Variant::Attention, 4, 6, 2)).unwrap();
        let pred = m.predict(&random_window(6, 1, 3)).unwrap();
        let weights = pred.attention_weights.unwrap();
        assert_eq!(weights.len(), 6);
        assert!((weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dropout_zero_rate_is_identity() {
        let m = Matrix::column(&[1.0, -2.0, 3.0]);
        let out = apply_dropout(&m, 0.0, &mut SeededRng::new(0));
        assert_eq!(out, m);
    }

    #[test]
    fn dropout_survivor_fraction_is_binomial() {
        // 10_000 units at rate 0.5: survivors within 3 sigma of 5_000.
        let ones = Matrix::from_vec(10_000, 1, vec![1.0; 10_000]).unwrap();
        let out = apply_dropout(&ones, 0.5, &mut SeededRng::new(77));
        let survivors = out.data().iter().filter(|&&v| v != 0.0).count();
        let sigma = (10_000.0_f64 * 0.25).sqrt();
        assert!((survivors as f64 - 5000.0).abs() < 3.0 * sigma, "{survivors}");
        // Survivors carry the inverted scale.
        assert!(out.data().iter().all(|&v| v == 0.0 || v == 2.0));
    }

    #[test]
    fn dropout_preserves_expected_activation() {
        // Mean over 10^4 masks within 2% of the unmasked value.
        let mut rng = SeededRng::new(5);
        let value = 0.8;
        let m = Matrix::column(&[value]);
        let n = 10_000;
        let total: f64 = (0..n).map(|_| apply_dropout(&m, 0.3, &mut rng).get(0, 0)).sum();
        let mean = total / n as f64;
        assert!((mean - value).abs() / value < 0.02, "mean {mean}");
    }

    #[test]
    fn inference_bypasses_dropout() {
        let mut cfg = config(Variant::Plain, 4, 3, 1);
        cfg.dropout = 0.9;
        let m = Model::build(cfg).unwrap();
        let window = random_window(3, 1, 4);
        let a = m.predict(&window).unwrap();
        let b = m.predict(&window).unwrap();
        assert_eq!(a.value, b.value);
    }

    #[test]
    fn training_forward_with_dropout_is_seed_deterministic() {
        let mut cfg = config(Variant::Plain, 4, 3, 1);
        cfg.dropout = 0.5;
        let m = Model::build(cfg).unwrap();
        let window = random_window(3, 1, 4);
        let (a, _) = m.forward_train(&window, &mut SeededRng::new(9)).unwrap();
        let (b, _) = m.forward_train(&window, &mut SeededRng::new(9)).unwrap();
        assert_eq!(a.value, b.value);
    }

    #[test]
    fn end_to_end_gradients_match_finite_differences() {
        // Full-model MSE gradient check, both variants, size=4, lag=6,
        // several seeds; every parameter entry within relative error 1e-4.
        for variant in [Variant::Plain, Variant::Attention] {
            for seed in 0..3u64 {
                let model = Model::build(config(variant, 4, 6, seed)).unwrap();
                let window = random_window(6, 1, seed);
                let target = 0.3;

                let (pred, cache) = model
                    .forward_train(&window, &mut SeededRng::new(0))
                    .unwrap();
                let upstream = 2.0 * (pred.value - target);
                let analytic = model.backward(&cache, upstream).unwrap();

                let analytic_views = analytic.views();
                for (p, analytic_m) in analytic_views.iter().enumerate() {
                    let base = model.param_views()[p].clone();
                    let numeric = finite_diff_grad(
                        |m| {
                            let mut probe = model.clone();
                            *probe.param_views_mut()[p] = m.clone();
                            let y = probe.predict(&window).unwrap().value;
                            (y - target).powi(2)
                        },
                        &base,
                        1e-5,
                    )
                    .unwrap();
                    for (a, n) in analytic_m.data().iter().zip(numeric.data()) {
                        assert!(
                            relative_error(*a, *n) < 1e-4,
                            "{variant} seed {seed} param {p}: {a} vs {n}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn checkpoint_round_trip_is_lossless() {
        let m = Model::build(config(Variant::Attention, 6, 4, 123)).unwrap();
        let mut buf = Vec::new();
        m.save(&mut buf).unwrap();
        let back = Model::load(buf.as_slice()).unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn checkpoint_rejects_unknown_schema_version() {
        let m = Model::build(config(Variant::Plain, 2, 2, 0)).unwrap();
        let mut buf = Vec::new();
        m.save(&mut buf).unwrap();
        let tampered = String::from_utf8(buf)
            .unwrap()
            .replace("\"schema_version\": 1", "\"schema_version\": 9");
        assert!(Model::load(tampered.as_bytes()).is_err());
    }
}
