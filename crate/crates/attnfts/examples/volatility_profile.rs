//! Rolling volatility profiles of series with different dynamics.
//!
//! ```bash
//! cargo run --release --example volatility_profile
//! ```

use attnfts::data::{rolling_volatility, synthesize, SyntheticSpec};

fn sparkline(values: &[f64]) -> String {
    const BARS: [char; 8] = ['▁', '▂', '▃', '▄', '▅', '▆', '▇', '█'];
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let span = (hi - lo).max(1e-12);
    values
        .iter()
        .map(|v| BARS[(((v - lo) / span) * 7.0).round() as usize])
        .collect()
}

fn main() -> attnfts::Result<()> {
    let window = 20;
    let specs = [
        SyntheticSpec::Sine { length: 260, noise_std: 0.2, seed: 4 },
        SyntheticSpec::RandomWalk { length: 260, noise_std: 0.01, seed: 4 },
        SyntheticSpec::Ar1 { length: 260, noise_std: 0.015, ar_coefficient: 0.7, seed: 4 },
    ];

    for spec in specs {
        let series = synthesize(&spec)?;
        let vol = rolling_volatility(&series, window)?;
        let mean = vol.iter().sum::<f64>() / vol.len() as f64;
        let peak = vol.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        // Downsample for a terminal-width sparkline.
        let sampled: Vec<f64> = vol.iter().step_by(4).cloned().collect();
        println!("{:<18} mean vol {:.5}, peak {:.5}", series.name, mean, peak);
        println!("  {}", sparkline(&sampled));
    }
    println!("\n(volatility = {window}-day rolling standard deviation of daily returns)");
    Ok(())
}
