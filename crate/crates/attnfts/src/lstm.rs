//! LSTM cell and full-sequence encoder with analytic backpropagation
//! through time.
//!
//! The cell is the standard formulation with input, forget, and output
//! gates and no peepholes:
//!
//! ```text
//! i = sigmoid(W_i x + U_i h + b_i)
//! f = sigmoid(W_f x + U_f h + b_f)
//! o = sigmoid(W_o x + U_o h + b_o)
//! g = tanh   (W_g x + U_g h + b_g)
//! c' = f * c + i * g
//! h' = o * tanh(c')
//! ```
//!
//! Sequences are at most one window long (the model's lag, <= 60), so the
//! backward pass runs full BPTT with no truncation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::Matrix;
use crate::rng::SeededRng;
use crate::{numeric, rng};

/// Weights for one gate: input projection, recurrent projection, bias.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateParams {
    /// size x input_dim
    pub w: Matrix,
    /// size x size
    pub u: Matrix,
    /// size x 1
    pub b: Matrix,
}

impl GateParams {
    fn zeros(size: usize, input_dim: usize) -> Self {
        GateParams {
            w: Matrix::zeros(size, input_dim),
            u: Matrix::zeros(size, size),
            b: Matrix::zeros(size, 1),
        }
    }

    fn xavier(size: usize, input_dim: usize, rng: &mut SeededRng) -> Self {
        GateParams {
            w: numeric::xavier_init(size, input_dim, rng),
            u: numeric::xavier_init(size, size, rng),
            b: Matrix::zeros(size, 1),
        }
    }

    /// Pre-activation W x + U h + b.
    fn pre_activation(&self, x: &Matrix, h: &Matrix) -> Result<Matrix> {
        self.w.matmul(x)?.add(&self.u.matmul(h)?)?.add(&self.b)
    }
}

/// Full parameter set of one LSTM encoder.
///
/// The same struct doubles as the gradient container returned by
/// [`lstm_backward`]; gradients have identical layout to the parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LstmParams {
    pub size: usize,
    pub input_dim: usize,
    pub input_gate: GateParams,
    pub forget_gate: GateParams,
    pub output_gate: GateParams,
    pub cell_gate: GateParams,
}

impl LstmParams {
    pub fn zeros(size: usize, input_dim: usize) -> Self {
        LstmParams {
            size,
            input_dim,
            input_gate: GateParams::zeros(size, input_dim),
            forget_gate: GateParams::zeros(size, input_dim),
            output_gate: GateParams::zeros(size, input_dim),
            cell_gate: GateParams::zeros(size, input_dim),
        }
    }

    /// Xavier-uniform weights, zero biases, except the forget-gate bias
    /// which starts at 1.0 so early training does not erase the cell state.
    pub fn init(size: usize, input_dim: usize, rng: &mut SeededRng) -> Self {
        let mut params = LstmParams {
            size,
            input_dim,
            input_gate: GateParams::xavier(size, input_dim, rng),
            forget_gate: GateParams::xavier(size, input_dim, rng),
            output_gate: GateParams::xavier(size, input_dim, rng),
            cell_gate: GateParams::xavier(size, input_dim, rng),
        };
        for b in params.forget_gate.b.data_mut() {
            *b = 1.0;
        }
        params
    }

    /// Total learnable scalars: 4 * (size*input_dim + size^2 + size).
    pub fn param_count(&self) -> usize {
        4 * (self.size * self.input_dim + self.size * self.size + self.size)
    }

    pub fn gates(&self) -> [&GateParams; 4] {
        [
            &self.input_gate,
            &self.forget_gate,
            &self.output_gate,
            &self.cell_gate,
        ]
    }

    pub fn gates_mut(&mut self) -> [&mut GateParams; 4] {
        [
            &mut self.input_gate,
            &mut self.forget_gate,
            &mut self.output_gate,
            &mut self.cell_gate,
        ]
    }
}

/// Hidden and cell state. Hidden entries always lie in [-1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct LstmState {
    /// size x 1 hidden state
    pub h: Matrix,
    /// size x 1 cell state
    pub c: Matrix,
}

impl LstmState {
    pub fn zeros(size: usize) -> Self {
        LstmState {
            h: Matrix::zeros(size, 1),
            c: Matrix::zeros(size, 1),
        }
    }
}

/// Everything the backward pass needs from one forward step.
#[derive(Debug, Clone)]
pub struct StepCache {
    x: Matrix,
    h_prev: Matrix,
    c_prev: Matrix,
    gate_i: Matrix,
    gate_f: Matrix,
    gate_o: Matrix,
    gate_g: Matrix,
    tanh_c: Matrix,
}

/// Per-timestep caches from one [`encode_sequence`] call.
#[derive(Debug, Clone)]
pub struct BpttCache {
    steps: Vec<StepCache>,
}

impl BpttCache {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// One LSTM step. `x` must be input_dim x 1.
pub fn lstm_cell_forward(
    params: &LstmParams,
    x: &Matrix,
    prev: &LstmState,
) -> Result<(LstmState, StepCache)> {
    if x.shape() != (params.input_dim, 1) {
        return Err(Error::shape("lstm input", x.shape(), (params.input_dim, 1)));
    }
    if prev.h.shape() != (params.size, 1) {
        return Err(Error::shape("lstm state", prev.h.shape(), (params.size, 1)));
    }
    let gate_i = params.input_gate.pre_activation(x, &prev.h)?.sigmoid_map();
    let gate_f = params.forget_gate.pre_activation(x, &prev.h)?.sigmoid_map();
    let gate_o = params.output_gate.pre_activation(x, &prev.h)?.sigmoid_map();
    let gate_g = params.cell_gate.pre_activation(x, &prev.h)?.tanh_map();

    let c = gate_f.hadamard(&prev.c)?.add(&gate_i.hadamard(&gate_g)?)?;
    let tanh_c = c.tanh_map();
    let h = gate_o.hadamard(&tanh_c)?;

    let cache = StepCache {
        x: x.clone(),
        h_prev: prev.h.clone(),
        c_prev: prev.c.clone(),
        gate_i,
        gate_f,
        gate_o,
        gate_g,
        tanh_c,
    };
    Ok((LstmState { h, c }, cache))
}

/// Runs the encoder over a whole window starting from the zero state.
///
/// Returns one annotation (hidden state) per timestep, the final state, and
/// the cache consumed by [`lstm_backward`].
pub fn encode_sequence(
    params: &LstmParams,
    inputs: &[Matrix],
) -> Result<(Vec<Matrix>, LstmState, BpttCache)> {
    if inputs.is_empty() {
        return Err(Error::Argument("encode_sequence on empty sequence".into()));
    }
    let mut state = LstmState::zeros(params.size);
    let mut annotations = Vec::with_capacity(inputs.len());
    let mut steps = Vec::with_capacity(inputs.len());
    for x in inputs {
        let (next, cache) = lstm_cell_forward(params, x, &state)?;
        annotations.push(next.h.clone());
        steps.push(cache);
        state = next;
    }
    Ok((annotations, state, BpttCache { steps }))
}

/// Exact reverse-mode gradients of [`encode_sequence`].
///
/// `grad_annotations[t]` is the loss gradient with respect to annotation t
/// (size x 1, zero where the loss does not touch that timestep). Returns the
/// parameter gradients and the gradient with respect to each input.
pub fn lstm_backward(
    params: &LstmParams,
    cache: &BpttCache,
    grad_annotations: &[Matrix],
) -> Result<(LstmParams, Vec<Matrix>)> {
    if grad_annotations.len() != cache.steps.len() {
        return Err(Error::Shape {
            op: "lstm_backward",
            lhs: format!("{} gradient entries", grad_annotations.len()),
            rhs: format!("{} cached steps", cache.steps.len()),
        });
    }
    let size = params.size;
    let mut grads = LstmParams::zeros(size, params.input_dim);
    let mut grad_inputs = vec![Matrix::zeros(params.input_dim, 1); cache.steps.len()];

    let mut dh_next = Matrix::zeros(size, 1);
    let mut dc_next = Matrix::zeros(size, 1);

    for (t, step) in cache.steps.iter().enumerate().rev() {
        if grad_annotations[t].shape() != (size, 1) {
            return Err(Error::shape(
                "lstm_backward annotation gradient",
                grad_annotations[t].shape(),
                (size, 1),
            ));
        }
        let dh = grad_annotations[t].add(&dh_next)?;

        // dc = dh * o * (1 - tanh(c)^2) + carry from t+1
        let dtanh = step.tanh_c.map(|v| 1.0 - v * v);
        let dc = dh.hadamard(&step.gate_o)?.hadamard(&dtanh)?.add(&dc_next)?;

        // Pre-activation gate gradients.
        let d_i = dc
            .hadamard(&step.gate_g)?
            .hadamard(&step.gate_i.map(|v| v * (1.0 - v)))?;
        let d_f = dc
            .hadamard(&step.c_prev)?
            .hadamard(&step.gate_f.map(|v| v * (1.0 - v)))?;
        let d_o = dh
            .hadamard(&step.tanh_c)?
            .hadamard(&step.gate_o.map(|v| v * (1.0 - v)))?;
        let d_g = dc
            .hadamard(&step.gate_i)?
            .hadamard(&step.gate_g.map(|v| 1.0 - v * v))?;

        let x_t = step.x.transpose();
        let h_t = step.h_prev.transpose();
        let mut dh_prev = Matrix::zeros(size, 1);
        let mut dx = Matrix::zeros(params.input_dim, 1);
        let gate_grads = [&d_i, &d_f, &d_o, &d_g];
        for (gate, d_gate) in grads.gates_mut().into_iter().zip(gate_grads) {
            gate.w.add_assign(&d_gate.matmul(&x_t)?)?;
            gate.u.add_assign(&d_gate.matmul(&h_t)?)?;
            gate.b.add_assign(d_gate)?;
        }
        for (gate, d_gate) in params.gates().into_iter().zip(gate_grads) {
            dh_prev.add_assign(&gate.u.transpose().matmul(d_gate)?)?;
            dx.add_assign(&gate.w.transpose().matmul(d_gate)?)?;
        }

        grad_inputs[t] = dx;
        dh_next = dh_prev;
        dc_next = dc.hadamard(&step.gate_f)?;
    }

    Ok((grads, grad_inputs))
}

/// Derives per-test input/parameter fixtures; shared by the gradient checks
/// here and at the model level.
#[doc(hidden)]
pub fn random_inputs(input_dim: usize, len: usize, seed: u64) -> Vec<Matrix> {
    let mut r = SeededRng::new(rng::derive_seed(seed, 17));
    (0..len)
        .map(|_| {
            Matrix::from_vec(input_dim, 1, (0..input_dim).map(|_| r.uniform(-1.0, 1.0)).collect())
                .unwrap()
        })
        .collect()
}
