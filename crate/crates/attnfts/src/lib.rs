//! Forecasting daily price series with an LSTM and an LSTM with additive
//! attention, compared under walk-forward validation.
//!
//! The crate is a library first: every major capability has a runnable
//! example under `examples/`. A thin `attnfts` binary wraps the same
//! pipeline for file-driven runs (see the README for the config format).
//!
//! ```bash
//! cargo run --release --example synthesize_series
//! cargo run --release --example train_plain_lstm
//! cargo run --release --example train_attention_lstm
//! cargo run --release --example gradient_check
//! cargo run --release --example shuffling_comparison
//! cargo run --release --example grid_search_tuning
//! cargo run --release --example compare_variants
//! cargo run --release --example volatility_profile
//! cargo run --release --example checkpoint_roundtrip
//! ```
//!
//! ## Modules
//!
//! - [`numeric`]: dense f64 matrices, softmax, Xavier init, and the
//!   finite-difference gradient oracle used to verify every backward pass.
//! - [`rng`]: fully specified SplitMix64 randomness; fixed seeds reproduce
//!   runs bit-for-bit.
//! - [`lstm`]: LSTM cell and sequence encoder with exact BPTT.
//! - [`attention`]: additive (alignment) attention: scores, softmax
//!   weights, context vector, and analytic gradients.
//! - [`model`]: the two window-to-scalar model variants with tanh-bounded
//!   output, inverted dropout, and JSON checkpoints.
//! - [`training`]: MSE loss, Adam, and the epoch loop with per-variant
//!   epoch caps (100 plain / 25 attention).
//! - [`data`]: CSV ingestion, returns, train-only min-max scaling with a
//!   look-ahead guard, windowing, synthetic generators, and rolling
//!   volatility.
//! - [`evaluation`]: fixed-origin, rolling-origin, and rolling-window
//!   validation with per-split retraining, up-down accuracy, and the
//!   variant-comparison harness.
//! - [`tuning`]: deterministic grid search over (size, lag, dropout).
//! - [`cli`]: the subcommand pipeline behind the `attnfts` binary.

pub mod attention;
pub mod cli;
pub mod data;
pub mod error;
pub mod evaluation;
pub mod lstm;
pub mod model;
pub mod numeric;
pub mod rng;
pub mod training;
pub mod tuning;

pub use data::{load_csv, make_windows, synthesize, PriceSeries, Scaler, SyntheticSpec, WindowSet};
pub use error::{Error, Result};
pub use evaluation::{
    compare_variants, evaluate, plan_splits, thresholded_accuracy, up_down_accuracy,
    ComparisonReport, EvalReport, SplitPlan,
};
pub use model::{Model, ModelConfig, Prediction, Variant};
pub use numeric::{finite_diff_grad, softmax, Matrix};
pub use rng::SeededRng;
pub use training::{fit, mse, AdamState, LossHistory, TrainConfig};
pub use tuning::{grid_search, select_best, Grid, TuneResult};
