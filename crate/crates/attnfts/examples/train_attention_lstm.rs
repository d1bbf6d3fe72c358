//! Train the attention variant and inspect where it puts its weight.
//!
//! After training on an AR(1) series, the example prints the attention
//! distribution over the window timesteps for a few validation windows,
//! the diagnostic the attention variant exposes on every prediction.
//!
//! ```bash
//! cargo run --release --example train_attention_lstm
//! ```

use attnfts::data::{synthesize, SyntheticSpec};
use attnfts::evaluation::{plan_splits, split_windows, SplitPlan};
use attnfts::model::{Model, ModelConfig, Variant};
use attnfts::training::{fit, TrainConfig};

fn main() -> attnfts::Result<()> {
    let series = synthesize(&SyntheticSpec::Ar1 {
        length: 300,
        noise_std: 0.01,
        ar_coefficient: 0.6,
        seed: 11,
    })?;

    let config = ModelConfig {
        variant: Variant::Attention,
        size: 16,
        lag: 10,
        dropout: 0.05,
        input_dim: 1,
        seed: 42,
    };
    let plan = SplitPlan::FixedOrigin { train_frac: 0.8 };
    let split = plan_splits(&plan, series.len())?[0];
    let (_, train_ws, val_ws) = split_windows(&series, &split, config.lag)?;

    let mut model = Model::build(config)?;
    println!(
        "attention LSTM: size 16, lag 10, {} parameters (528 of them in the alignment model)",
        model.param_count()
    );

    let train_cfg = TrainConfig {
        seed: 7,
        ..TrainConfig::default_for(Variant::Attention)
    };
    let history = fit(&mut model, &train_ws, &val_ws, &train_cfg)?;
    let last = history.final_epoch().unwrap();
    println!(
        "trained {} epochs: train loss {:.6}, val loss {:.6}\n",
        history.len(),
        last.train_loss,
        last.val_loss
    );

    println!("attention weights per window timestep (oldest -> newest):");
    for (i, window) in val_ws.windows.iter().take(4).enumerate() {
        let pred = model.predict(window)?;
        let weights = pred.attention_weights.expect("attention variant emits weights");
        let bars: Vec<String> = weights
            .iter()
            .map(|w| format!("{:>5.3}", w))
            .collect();
        println!(
            "window {i}: [{}] -> prediction {:+.4} (target {:+.4})",
            bars.join(" "),
            pred.value,
            val_ws.targets[i]
        );
    }
    Ok(())
}
