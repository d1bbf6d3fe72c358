//! Small deterministic grid search over (size, lag, dropout).
//!
//! Prints the full loss surface as a table plus the selected best cell
//! (minimum validation loss; ties prefer the simpler model).
//!
//! ```bash
//! cargo run --release --example grid_search_tuning
//! ```

use attnfts::data::{synthesize, SyntheticSpec};
use attnfts::evaluation::SplitPlan;
use attnfts::model::Variant;
use attnfts::training::TrainConfig;
use attnfts::tuning::{grid_search, CellOutcome, Grid};

fn main() -> attnfts::Result<()> {
    let series = synthesize(&SyntheticSpec::Sine {
        length: 240,
        noise_std: 0.4,
        seed: 13,
    })?;

    let grid = Grid {
        sizes: vec![8, 16],
        lags: vec![5, 10, 20],
        dropouts: vec![0.0, 0.1],
        variant: Variant::Plain,
        seeds_per_cell: 1,
    };
    let train_cfg = TrainConfig {
        max_epochs: 15,
        seed: 3,
        ..TrainConfig::default_for(Variant::Plain)
    };

    println!("searching {} cells...", grid.cell_count());
    let result = grid_search(
        &grid,
        &series,
        &SplitPlan::FixedOrigin { train_frac: 0.8 },
        &train_cfg,
    )?;

    println!("{:>5} {:>5} {:>8} {:>12} {:>10}", "size", "lag", "dropout", "val_loss", "accuracy");
    for cell in &result.cells {
        match &cell.outcome {
            CellOutcome::Ok { val_loss, up_down_accuracy, .. } => println!(
                "{:>5} {:>5} {:>8} {:>12.6} {:>10.4}",
                cell.size, cell.lag, cell.dropout, val_loss, up_down_accuracy
            ),
            CellOutcome::Failed { error } => {
                println!("{:>5} {:>5} {:>8}  failed: {error}", cell.size, cell.lag, cell.dropout)
            }
        }
    }
    println!(
        "\nbest cell: size={} lag={} dropout={}",
        result.best.size, result.best.lag, result.best.dropout
    );
    println!("\nCSV form (what `attnfts gridsearch` writes):\n{}", result.to_csv());
    Ok(())
}
