//! Generate the three kinds of synthetic price series and write them as
//! `date,close` CSVs under `target/examples-out/`.
//!
//! ```bash
//! cargo run --release --example synthesize_series
//! ```

use attnfts::data::{synthesize, to_returns, SyntheticSpec};

fn main() -> attnfts::Result<()> {
    let out_dir = std::path::Path::new("target/examples-out");
    std::fs::create_dir_all(out_dir)?;

    let specs = [
        SyntheticSpec::Sine { length: 300, noise_std: 0.5, seed: 1 },
        SyntheticSpec::RandomWalk { length: 300, noise_std: 0.01, seed: 2 },
        SyntheticSpec::Ar1 { length: 300, noise_std: 0.01, ar_coefficient: 0.5, seed: 3 },
    ];

    for spec in specs {
        let series = synthesize(&spec)?;
        let returns = to_returns(&series)?;
        let mean = returns.iter().sum::<f64>() / returns.len() as f64;
        let std = (returns.iter().map(|r| (r - mean).powi(2)).sum::<f64>()
            / returns.len() as f64)
            .sqrt();
        println!(
            "{:<18} {} prices spanning {}..{}, daily return mean {:+.5}, std {:.5}",
            series.name,
            series.len(),
            series.dates.first().unwrap(),
            series.dates.last().unwrap(),
            mean,
            std
        );

        let path = out_dir.join(format!("{}.csv", series.name));
        let mut buf = Vec::new();
        series.write_csv(&mut buf)?;
        std::fs::write(&path, buf)?;
        println!("  -> {}", path.display());
    }
    Ok(())
}
