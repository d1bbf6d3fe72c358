//! Train the plain LSTM on a noisy sine series and watch the loss curve.
//!
//! ```bash
//! cargo run --release --example train_plain_lstm
//! ```

use attnfts::data::{synthesize, SyntheticSpec};
use attnfts::evaluation::{plan_splits, split_windows, SplitPlan};
use attnfts::model::{Model, ModelConfig, Variant};
use attnfts::training::{fit, TrainConfig};

fn main() -> attnfts::Result<()> {
    let series = synthesize(&SyntheticSpec::Sine {
        length: 300,
        noise_std: 0.4,
        seed: 5,
    })?;

    let config = ModelConfig {
        variant: Variant::Plain,
        size: 16,
        lag: 15,
        dropout: 0.1,
        input_dim: 1,
        seed: 42,
    };
    let plan = SplitPlan::FixedOrigin { train_frac: 0.8 };
    let split = plan_splits(&plan, series.len())?[0];
    let (_, train_ws, val_ws) = split_windows(&series, &split, config.lag)?;

    let mut model = Model::build(config)?;
    println!(
        "plain LSTM: size 16, lag 15, {} parameters, {} train / {} val windows",
        model.param_count(),
        train_ws.len(),
        val_ws.len()
    );

    let train_cfg = TrainConfig {
        seed: 7,
        ..TrainConfig::default_for(Variant::Plain)
    };
    let history = fit(&mut model, &train_ws, &val_ws, &train_cfg)?;

    println!("epoch  train_loss    val_loss");
    for entry in history.epochs.iter().step_by(10) {
        println!("{:>5}  {:>10.6}  {:>10.6}", entry.epoch, entry.train_loss, entry.val_loss);
    }
    let last = history.final_epoch().unwrap();
    println!("final  {:>10.6}  {:>10.6}  ({} epochs)", last.train_loss, last.val_loss, history.len());
    Ok(())
}
