//! Compare the three validation-shuffling schemes on the same model and
//! series: fixed origin, rolling origin recalibration, and rolling window.
//!
//! A single chronological split can flatter or punish a model depending on
//! where the volatile stretch lands; the rolling schemes average over
//! several splits instead.
//!
//! ```bash
//! cargo run --release --example shuffling_comparison
//! ```

use attnfts::data::{synthesize, SyntheticSpec};
use attnfts::evaluation::{evaluate, SplitPlan};
use attnfts::model::{ModelConfig, Variant};
use attnfts::training::TrainConfig;

fn main() -> attnfts::Result<()> {
    let series = synthesize(&SyntheticSpec::Ar1 {
        length: 400,
        noise_std: 0.01,
        ar_coefficient: 0.5,
        seed: 21,
    })?;
    let config = ModelConfig {
        variant: Variant::Plain,
        size: 8,
        lag: 5,
        dropout: 0.0,
        input_dim: 1,
        seed: 42,
    };
    let train_cfg = TrainConfig {
        max_epochs: 30,
        seed: 7,
        ..TrainConfig::default_for(Variant::Plain)
    };

    let plans = [
        SplitPlan::FixedOrigin { train_frac: 0.8 },
        SplitPlan::RollingOrigin { num_splits: 5, initial_frac: 0.5, stride: None },
        SplitPlan::RollingWindow { train_len: 160, val_len: 40, stride: 40 },
    ];

    println!("{:<38} {:>7} {:>12} {:>10}", "plan", "splits", "mean loss", "accuracy");
    for plan in plans {
        let report = evaluate(&config, &train_cfg, &series, &plan)?;
        println!(
            "{:<38} {:>7} {:>12.6} {:>10.4}",
            report.plan.describe(),
            report.splits.len(),
            report.aggregate.mean_val_loss,
            report.aggregate.mean_up_down_accuracy
        );
        for split in &report.splits {
            println!(
                "    split {}: train [{}, {}), val [{}, {}), loss {:.6}, accuracy {:.4}",
                split.split_index,
                split.split.train_start,
                split.split.train_end,
                split.split.val_start,
                split.split.val_end,
                split.val_loss,
                split.up_down_accuracy
            );
        }
    }
    Ok(())
}
