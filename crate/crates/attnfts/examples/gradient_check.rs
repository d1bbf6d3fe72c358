//! Verify the analytic gradients of both model variants against the
//! central-difference oracle.
//!
//! Every parameter matrix of the full window-to-prediction-to-MSE pipeline
//! is perturbed entry by entry; the worst relative error across both
//! variants is reported (anything below 1e-4 is a pass at 64-bit
//! precision).
//!
//! ```bash
//! cargo run --release --example gradient_check
//! ```

use attnfts::model::{Model, ModelConfig, Variant};
use attnfts::numeric::{finite_diff_grad, relative_error, Matrix};
use attnfts::rng::SeededRng;

fn main() -> attnfts::Result<()> {
    let mut rng = SeededRng::new(2024);
    for variant in [Variant::Plain, Variant::Attention] {
        let model = Model::build(ModelConfig {
            variant,
            size: 4,
            lag: 6,
            dropout: 0.0,
            input_dim: 1,
            seed: 9,
        })?;
        let window = Matrix::from_vec(6, 1, (0..6).map(|_| rng.uniform(-1.0, 1.0)).collect())?;
        let target = 0.25;

        let (pred, cache) = model.forward_train(&window, &mut SeededRng::new(0))?;
        let grads = model.backward(&cache, 2.0 * (pred.value - target))?;

        let mut worst: f64 = 0.0;
        let mut checked = 0usize;
        let grad_views = grads.views();
        for (p, grad_view) in grad_views.iter().enumerate() {
            let base = model.param_views()[p].clone();
            let numeric = finite_diff_grad(
                |m| {
                    let mut probe = model.clone();
                    *probe.param_views_mut()[p] = m.clone();
                    (probe.predict(&window).unwrap().value - target).powi(2)
                },
                &base,
                1e-5,
            )?;
            for (a, n) in grad_view.data().iter().zip(numeric.data()) {
                worst = worst.max(relative_error(*a, *n));
                checked += 1;
            }
        }
        println!(
            "{variant:<9} variant: {checked} gradient entries checked, worst relative error {worst:.3e}"
        );
    }
    Ok(())
}
