//! Additive attention over encoder annotations.
//!
//! Scoring uses the concat/tanh alignment form: a decoder state and one
//! annotation are each projected into an alignment space, summed, squashed
//! with tanh, and reduced to a scalar by a learned score vector. Scores are
//! softmax-normalized into weights and the context vector is the weighted
//! sum of annotations.
//!
//! All functions here are pure; the backward pass recomputes the forward
//! internally rather than carrying a cache.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{self, Matrix};
use crate::rng::SeededRng;

/// Alignment parameters.
///
/// Doubles as the gradient container returned by [`attention_backward`];
/// gradients have identical layout to the parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttentionParams {
    /// Width of the alignment space.
    pub attn_dim: usize,
    /// attn_dim x size projection of the decoder state.
    pub state_proj: Matrix,
    /// attn_dim x size projection of an annotation.
    pub annot_proj: Matrix,
    /// attn_dim x 1 score vector.
    pub score_vec: Matrix,
}

impl AttentionParams {
    pub fn zeros(attn_dim: usize, size: usize) -> Self {
        AttentionParams {
            attn_dim,
            state_proj: Matrix::zeros(attn_dim, size),
            annot_proj: Matrix::zeros(attn_dim, size),
            score_vec: Matrix::zeros(attn_dim, 1),
        }
    }

    pub fn init(attn_dim: usize, size: usize, rng: &mut SeededRng) -> Self {
        AttentionParams {
            attn_dim,
            state_proj: numeric::xavier_init(attn_dim, size, rng),
            annot_proj: numeric::xavier_init(attn_dim, size, rng),
            score_vec: numeric::xavier_init(attn_dim, 1, rng),
        }
    }

    pub fn param_count(&self) -> usize {
        self.attn_dim * self.state_proj.cols() + self.attn_dim * self.annot_proj.cols() + self.attn_dim
    }
}

/// One evaluated attention step: raw scores, normalized weights, and the
/// context vector. Weights are nonnegative and sum to 1.
#[derive(Debug, Clone)]
pub struct AttentionResult {
    pub scores: Vec<f64>,
    pub weights: Vec<f64>,
    /// size x 1 weighted sum of annotations.
    pub context: Matrix,
}

/// Alignment score of one (decoder state, annotation) pair:
/// `score_vec^T tanh(state_proj s + annot_proj h)`.
pub fn align(params: &AttentionParams, state: &Matrix, annotation: &Matrix) -> Result<f64> {
    let z = params
        .state_proj
        .matmul(state)?
        .add(&params.annot_proj.matmul(annotation)?)?
        .tanh_map();
    Ok(params.score_vec.transpose().matmul(&z)?.get(0, 0))
}

/// Softmax normalization of alignment scores.
pub fn attention_weights(scores: &[f64]) -> Result<Vec<f64>> {
    numeric::softmax(scores)
}

/// Weighted sum of annotations.
pub fn context_vector(weights: &[f64], annotations: &[Matrix]) -> Result<Matrix> {
    if weights.len() != annotations.len() {
        return Err(Error::Shape {
            op: "context_vector",
            lhs: format!("{} weights", weights.len()),
            rhs: format!("{} annotations", annotations.len()),
        });
    }
    if annotations.is_empty() {
        return Err(Error::Argument("context_vector of empty annotation set".into()));
    }
    let mut context = Matrix::zeros(annotations[0].rows(), annotations[0].cols());
    for (&w, h) in weights.iter().zip(annotations) {
        context.add_assign(&h.scale(w))?;
    }
    Ok(context)
}

/// Full attention step: score every annotation against the decoder state,
/// normalize, and form the context vector.
pub fn attend(
    params: &AttentionParams,
    state: &Matrix,
    annotations: &[Matrix],
) -> Result<AttentionResult> {
    if annotations.is_empty() {
        return Err(Error::Argument("attend over empty annotation set".into()));
    }
    let scores = annotations
        .iter()
        .map(|h| align(params, state, h))
        .collect::<Result<Vec<f64>>>()?;
    let weights = attention_weights(&scores)?;
    let context = context_vector(&weights, annotations)?;
    Ok(AttentionResult {
        scores,
        weights,
        context,
    })
}

/// Exact reverse-mode gradients of [`attend`] with respect to the
/// parameters, the decoder state, and every annotation, given the upstream
/// gradient on the context vector.
pub fn attention_backward(
    params: &AttentionParams,
    state: &Matrix,
    annotations: &[Matrix],
    grad_context: &Matrix,
) -> Result<(AttentionParams, Matrix, Vec<Matrix>)> {
    if annotations.is_empty() {
        return Err(Error::Argument("attention_backward over empty annotation set".into()));
    }
    if grad_context.shape() != annotations[0].shape() {
        return Err(Error::shape(
            "attention_backward context gradient",
            grad_context.shape(),
            annotations[0].shape(),
        ));
    }
    // Recompute the forward quantities.
    let projected_state = params.state_proj.matmul(state)?;
    let tanh_vecs = annotations
        .iter()
        .map(|h| Ok(projected_state.add(&params.annot_proj.matmul(h)?)?.tanh_map()))
        .collect::<Result<Vec<Matrix>>>()?;
    let scores = tanh_vecs
        .iter()
        .map(|z| Ok(params.score_vec.transpose().matmul(z)?.get(0, 0)))
        .collect::<Result<Vec<f64>>>()?;
    let weights = attention_weights(&scores)?;

    // Context path: d(weight_j) and d(annotation_j) contributions.
    let d_weights: Vec<f64> = annotations
        .iter()
        .map(|h| Ok(grad_context.transpose().matmul(h)?.get(0, 0)))
        .collect::<Result<Vec<f64>>>()?;
    let mut grad_annotations: Vec<Matrix> = weights
        .iter()
        .map(|&w| grad_context.scale(w))
        .collect();

    // Softmax backward: d(score_j) = w_j (dw_j - sum_k dw_k w_k).
    let weighted_sum: f64 = d_weights.iter().zip(&weights).map(|(d, w)| d * w).sum();
    let d_scores: Vec<f64> = d_weights
        .iter()
        .zip(&weights)
        .map(|(d, w)| w * (d - weighted_sum))
        .collect();

    // Alignment backward per annotation.
    let mut grads = AttentionParams::zeros(params.attn_dim, params.state_proj.cols());
    let mut grad_state = Matrix::zeros(state.rows(), 1);
    let state_t = state.transpose();
    for ((z, h), &d_score) in tanh_vecs.iter().zip(annotations).zip(&d_scores) {
        grads.score_vec.add_assign(&z.scale(d_score))?;
        let dz = params
            .score_vec
            .scale(d_score)
            .hadamard(&z.map(|v| 1.0 - v * v))?;
        grads.state_proj.add_assign(&dz.matmul(&state_t)?)?;
        grads.annot_proj.add_assign(&dz.matmul(&h.transpose())?)?;
        grad_state.add_assign(&params.state_proj.transpose().matmul(&dz)?)?;
    }
    for (grad_h, dz_src) in grad_annotations.iter_mut().zip(tanh_vecs.iter().zip(&d_scores)) {
        let (z, &d_score) = dz_src;
        let dz = params
            .score_vec
            .scale(d_score)
            .hadamard(&z.map(|v| 1.0 - v * v))?;
        grad_h.add_assign(&params.annot_proj.transpose().matmul(&dz)?)?;
    }

    Ok((grads, grad_state, grad_annotations))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{finite_diff_grad, relative_error};
    use crate::rng;

    fn fixture(size: usize, len: usize, seed: u64) -> (AttentionParams, Matrix, Vec<Matrix>) {
        let mut r = SeededRng::new(seed);
        let params = AttentionParams::init(size, size, &mut r);
        let state = Matrix::from_vec(size, 1, (0..size).map(|_| r.uniform(-1.0, 1.0)).collect())
            .unwrap();
        let annotations = (0..len)
            .map(|_| {
                Matrix::from_vec(size, 1, (0..size).map(|_| r.uniform(-1.0, 1.0)).collect())
                    .unwrap()
            })
            .collect();
        (params, state, annotations)
    }

    #[test]
    fn zero_score_vector_gives_zero_score() {
        let (mut params, state, annotations) = fixture(3, 2, 1);
        params.score_vec = Matrix::zeros(3, 1);
        assert_eq!(align(&params, &state, &annotations[0]).unwrap(), 0.0);
    }

    #[test]
    fn all_zero_params_give_zero_score() {
        let params = AttentionParams::zeros(3, 3);
        let state = Matrix::column(&[1.0, 2.0, 3.0]);
        assert_eq!(align(&params, &state, &state).unwrap(), 0.0);
    }

    #[test]
    fn scalar_alignment_hand_computed() {
        // 1x1 everything: score = 1 * tanh(1*0.5 + 1*0.5) = tanh(1).
        let params = AttentionParams {
            attn_dim: 1,
            state_proj: Matrix::column(&[1.0]),
            annot_proj: Matrix::column(&[1.0]),
            score_vec: Matrix::column(&[1.0]),
        };
        let s = Matrix::column(&[0.5]);
        let h = Matrix::column(&[0.5]);
        let score = align(&params, &s, &h).unwrap();
        assert!((score - 1.0_f64.tanh()).abs() < 1e-15);
    }

    #[test]
    fn single_score_normalizes_to_one() {
        assert_eq!(attention_weights(&[3.7]).unwrap(), vec![1.0]);
    }

    #[test]
    fn equal_scores_normalize_uniformly() {
        let w = attention_weights(&[0.2; 4]).unwrap();
        for &x in &w {
            assert!((x - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn log_scores_hand_computed() {
        let w = attention_weights(&[1.0_f64.ln(), 3.0_f64.ln()]).unwrap();
        assert!((w[0] - 0.25).abs() < 1e-15);
        assert!((w[1] - 0.75).abs() < 1e-15);
    }

    #[test]
    fn single_annotation_context_is_that_annotation() {
        let h = Matrix::column(&[0.1, -0.9]);
        let c = context_vector(&[1.0], std::slice::from_ref(&h)).unwrap();
        assert_eq!(c, h);
    }

    #[test]
    fn uniform_weights_give_mean() {
        let a = Matrix::column(&[1.0, 2.0]);
        let b = Matrix::column(&[3.0, 6.0]);
        let c = context_vector(&[0.5, 0.5], &[a, b]).unwrap();
        assert_eq!(c.data(), &[2.0, 4.0]);
    }

    #[test]
    fn weighted_context_hand_computed() {
        let ones = Matrix::column(&[1.0, 1.0, 1.0]);
        let threes = Matrix::column(&[3.0, 3.0, 3.0]);
        let c = context_vector(&[0.25, 0.75], &[ones, threes]).unwrap();
        for &v in c.data() {
            assert!((v - 2.5).abs() < 1e-15);
        }
    }

    #[test]
    fn weight_length_mismatch_is_an_error() {
        let h = Matrix::column(&[1.0]);
        assert!(matches!(
            context_vector(&[0.5, 0.5], &[h]),
            Err(Error::Shape { .. })
        ));
    }

    #[test]
    fn attend_invariants_hold() {
        for seed in 0..100u64 {
            let len = 1 + (seed as usize % 7);
            let (params, state, annotations) = fixture(4, len, seed);
            let result = attend(&params, &state, &annotations).unwrap();
            let total: f64 = result.weights.iter().sum();
            assert!((total - 1.0).abs() < 1e-12, "seed {seed}");
            assert!(result.weights.iter().all(|&w| w >= 0.0));
            // Convexity: every context entry within the annotation envelope.
            for row in 0..4 {
                let entries: Vec<f64> = annotations.iter().map(|h| h.get(row, 0)).collect();
                let lo = entries.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = entries.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let v = result.context.get(row, 0);
                assert!(v >= lo - 1e-12 && v <= hi + 1e-12, "seed {seed} row {row}");
            }
        }
    }

    #[test]
    fn shift_invariance_of_weights() {
        let (params, state, annotations) = fixture(4, 5, 3);
        let result = attend(&params, &state, &annotations).unwrap();
        let shifted: Vec<f64> = result.scores.iter().map(|s| s + 123.456).collect();
        let w2 = attention_weights(&shifted).unwrap();
        for (a, b) in result.weights.iter().zip(&w2) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_upstream_gradient_gives_zero_grads() {
        let (params, state, annotations) = fixture(3, 4, 8);
        let zero = Matrix::zeros(3, 1);
        let (grads, grad_state, grad_annotations) =
            attention_backward(&params, &state, &annotations, &zero).unwrap();
        assert!(grads.state_proj.data().iter().all(|&v| v == 0.0));
        assert!(grads.annot_proj.data().iter().all(|&v| v == 0.0));
        assert!(grads.score_vec.data().iter().all(|&v| v == 0.0));
        assert!(grad_state.data().iter().all(|&v| v == 0.0));
        for g in grad_annotations {
            assert!(g.data().iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn single_annotation_pins_weight_and_kills_alignment_grads() {
        // With T = 1 the softmax output is constantly 1, so no gradient
        // reaches the alignment parameters; the context gradient passes
        // straight through to the annotation.
        let (params, state, annotations) = fixture(3, 1, 10);
        let result = attend(&params, &state, &annotations).unwrap();
        assert_eq!(result.weights, vec![1.0]);
        assert_eq!(result.context, annotations[0]);

        let upstream = Matrix::column(&[0.3, -0.2, 0.9]);
        let (grads, grad_state, grad_annotations) =
            attention_backward(&params, &state, &annotations, &upstream).unwrap();
        assert!(grads.state_proj.data().iter().all(|&v| v.abs() < 1e-15));
        assert!(grads.annot_proj.data().iter().all(|&v| v.abs() < 1e-15));
        assert!(grads.score_vec.data().iter().all(|&v| v.abs() < 1e-15));
        assert!(grad_state.data().iter().all(|&v| v.abs() < 1e-15));
        assert_eq!(grad_annotations[0], upstream);
    }

    /// Loss for the gradient checks: fixed random projection of the context.
    fn context_loss(
        params: &AttentionParams,
        state: &Matrix,
        annotations: &[Matrix],
        proj: &Matrix,
    ) -> f64 {
        let result = attend(params, state, annotations).unwrap();
        proj.transpose().matmul(&result.context).unwrap().get(0, 0)
    }

    #[test]
    fn analytic_gradients_match_finite_differences() {
        // size=4, T=5 and 20+ random seeds, relative error < 1e-4.
        for seed in 0..22u64 {
            let (params, state, annotations) = fixture(4, 5, seed);
            let mut proj_rng = SeededRng::new(rng::derive_seed(seed, 7));
            let proj =
                Matrix::from_vec(4, 1, (0..4).map(|_| proj_rng.uniform(-1.0, 1.0)).collect())
                    .unwrap();
            let upstream = proj.clone();
            let (grads, grad_state, grad_annotations) =
                attention_backward(&params, &state, &annotations, &upstream).unwrap();

            let check = |analytic: &Matrix, numeric: &Matrix, what: &str| {
                for (a, n) in analytic.data().iter().zip(numeric.data()) {
                    assert!(
                        relative_error(*a, *n) < 1e-4,
                        "seed {seed} {what}: {a} vs {n}"
                    );
                }
            };

            let n_state_proj = finite_diff_grad(
                |m| {
                    let mut p = params.clone();
                    p.state_proj = m.clone();
                    context_loss(&p, &state, &annotations, &proj)
                },
                &params.state_proj,
                1e-5,
            )
            .unwrap();
            check(&grads.state_proj, &n_state_proj, "state_proj");

            let n_annot_proj = finite_diff_grad(
                |m| {
                    let mut p = params.clone();
                    p.annot_proj = m.clone();
                    context_loss(&p, &state, &annotations, &proj)
                },
                &params.annot_proj,
                1e-5,
            )
            .unwrap();
            check(&grads.annot_proj, &n_annot_proj, "annot_proj");

            let n_score = finite_diff_grad(
                |m| {
                    let mut p = params.clone();
                    p.score_vec = m.clone();
                    context_loss(&p, &state, &annotations, &proj)
                },
                &params.score_vec,
                1e-5,
            )
            .unwrap();
            check(&grads.score_vec, &n_score, "score_vec");

            let n_state = finite_diff_grad(
                |m| context_loss(&params, m, &annotations, &proj),
                &state,
                1e-5,
            )
            .unwrap();
            check(&grad_state, &n_state, "state");

            for t in 0..annotations.len() {
                let n_annot = finite_diff_grad(
                    |m| {
                        let mut hs = annotations.clone();
                        hs[t] = m.clone();
                        context_loss(&params, &state, &hs, &proj)
                    },
                    &annotations[t],
                    1e-5,
                )
                .unwrap();
                check(&grad_annotations[t], &n_annot, &format!("annotation {t}"));
            }
        }
    }
}
