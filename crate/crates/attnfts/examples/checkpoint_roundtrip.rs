//! Save a trained model to a JSON checkpoint and reload it losslessly.
//!
//! ```bash
//! cargo run --release --example checkpoint_roundtrip
//! ```

use attnfts::data::make_windows;
use attnfts::model::{Model, ModelConfig, Variant};
use attnfts::training::{fit, TrainConfig};

fn main() -> attnfts::Result<()> {
    let returns: Vec<f64> = (0..60).map(|t| (t as f64 * 0.5).sin() * 0.4).collect();
    let windows = make_windows(&returns, 6)?;

    let mut model = Model::build(ModelConfig {
        variant: Variant::Attention,
        size: 8,
        lag: 6,
        dropout: 0.0,
        input_dim: 1,
        seed: 31,
    })?;
    let cfg = TrainConfig {
        max_epochs: 10,
        seed: 1,
        ..TrainConfig::default_for(Variant::Attention)
    };
    fit(&mut model, &windows, &windows, &cfg)?;

    let path = std::path::Path::new("target/examples-out/checkpoint.json");
    std::fs::create_dir_all(path.parent().unwrap())?;
    model.save_to_path(path)?;
    let size = std::fs::metadata(path)?.len();
    println!("saved {} parameters to {} ({size} bytes)", model.param_count(), path.display());

    let reloaded = Model::load_from_path(path)?;
    assert_eq!(model, reloaded);
    println!("reloaded checkpoint is bit-identical to the trained model");

    let probe = &windows.windows[0];
    let a = model.predict(probe)?.value;
    let b = reloaded.predict(probe)?.value;
    println!("prediction before save: {a:+.12}");
    println!("prediction after load:  {b:+.12}");
    assert_eq!(a, b);
    Ok(())
}
