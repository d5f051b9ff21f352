//! Forward evaluation: single cell step, one step of the whole stack,
//! and a full lag window with cached activations for backpropagation.

use rand::Rng;

use crate::error::{Error, Result};
use crate::neural::loss::softmax;
use crate::neural::params::{HeadKind, LayerState, LstmLayerParams, LstmStackParams, StackStates};

pub(crate) fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Activations of one layer at one time step, kept for backpropagation.
#[derive(Clone, Debug)]
pub(crate) struct StepCache {
    pub x: Vec<f64>,
    pub h_prev: Vec<f64>,
    pub c_prev: Vec<f64>,
    pub f: Vec<f64>,
    pub i: Vec<f64>,
    pub o: Vec<f64>,
    pub u: Vec<f64>,
    pub c: Vec<f64>,
    pub tanh_c: Vec<f64>,
    pub h: Vec<f64>,
}

fn gate_preact(w_x: &crate::neural::linalg::Mat, w_h: &crate::neural::linalg::Mat, b: &[f64], r: &[f64], x: &[f64], h: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut z = vec![0.0; n];
    for k in 0..n {
        z[k] = b[k] + r[k];
    }
    w_x.matvec_add(x, &mut z);
    w_h.matvec_add(h, &mut z);
    z
}

pub(crate) fn cell_step(params: &LstmLayerParams, state: &LayerState, x: &[f64]) -> StepCache {
    let zf = gate_preact(&params.w_fx, &params.w_fh, &params.b_f, &params.r_f, x, &state.h);
    let zi = gate_preact(&params.w_ix, &params.w_ih, &params.b_i, &params.r_i, x, &state.h);
    let zo = gate_preact(&params.w_ox, &params.w_oh, &params.b_o, &params.r_o, x, &state.h);
    let zu = gate_preact(&params.w_ux, &params.w_uh, &params.b_u, &params.r_u, x, &state.h);

    let n = params.cells();
    let mut f = vec![0.0; n];
    let mut i = vec![0.0; n];
    let mut o = vec![0.0; n];
    let mut u = vec![0.0; n];
    let mut c = vec![0.0; n];
    let mut tanh_c = vec![0.0; n];
    let mut h = vec![0.0; n];
    for k in 0..n {
        f[k] = sigmoid(zf[k]);
        i[k] = sigmoid(zi[k]);
        o[k] = sigmoid(zo[k]);
        u[k] = zu[k].tanh();
        c[k] = f[k] * state.c[k] + i[k] * u[k];
        tanh_c[k] = c[k].tanh();
        h[k] = o[k] * tanh_c[k];
        debug_assert!(h[k].abs() <= 1.0 + 1e-12);
    }
    StepCache {
        x: x.to_vec(),
        h_prev: state.h.clone(),
        c_prev: state.c.clone(),
        f,
        i,
        o,
        u,
        c,
        tanh_c,
        h,
    }
}

fn check_input(params: &LstmStackParams, x: &[f64]) -> Result<()> {
    if x.len() != params.input_dim() {
        return Err(Error::DimensionMismatch {
            what: "stack input",
            expected: params.input_dim(),
            got: x.len(),
        });
    }
    Ok(())
}

fn check_states(params: &LstmStackParams, states: &StackStates) -> Result<()> {
    if states.0.len() != params.layers.len() {
        return Err(Error::DimensionMismatch {
            what: "stack states",
            expected: params.layers.len(),
            got: states.0.len(),
        });
    }
    for (layer, s) in params.layers.iter().zip(&states.0) {
        if s.h.len() != layer.cells() || s.c.len() != layer.cells() {
            return Err(Error::DimensionMismatch {
                what: "layer state",
                expected: layer.cells(),
                got: s.h.len(),
            });
        }
    }
    Ok(())
}

/// One step of a single LSTM layer.
pub fn cell_forward(params: &LstmLayerParams, state: &LayerState, x: &[f64]) -> Result<LayerState> {
    if x.len() != params.input_dim() {
        return Err(Error::DimensionMismatch {
            what: "cell input",
            expected: params.input_dim(),
            got: x.len(),
        });
    }
    if state.h.len() != params.cells() {
        return Err(Error::DimensionMismatch {
            what: "cell state",
            expected: params.cells(),
            got: state.h.len(),
        });
    }
    let cache = cell_step(params, state, x);
    Ok(LayerState {
        c: cache.c.clone(),
        h: cache.h,
    })
}

/// Applies the head to the top hidden state: linear heads return the
/// raw affine output, softmax heads the normalized probabilities.
pub fn head_output(params: &LstmStackParams, h_top: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut logits = params.head.b.clone();
    params.head.w.matvec_add(h_top, &mut logits);
    let output = match params.head_kind {
        HeadKind::Linear => logits.clone(),
        HeadKind::Softmax => softmax(&logits),
    };
    (logits, output)
}

/// One step of the whole stack: layer `j`'s hidden state feeds layer
/// `j + 1` at the same time step, and the head maps the top hidden
/// state to the output.
pub fn stack_forward(
    params: &LstmStackParams,
    states: &StackStates,
    x: &[f64],
) -> Result<(StackStates, Vec<f64>)> {
    check_input(params, x)?;
    check_states(params, states)?;
    let mut new_states = Vec::with_capacity(params.layers.len());
    let mut input = x.to_vec();
    for (layer, state) in params.layers.iter().zip(&states.0) {
        let cache = cell_step(layer, state, &input);
        input = cache.h.clone();
        new_states.push(LayerState {
            c: cache.c.clone(),
            h: cache.h,
        });
    }
    let (_, output) = head_output(params, &input);
    Ok((StackStates(new_states), output))
}

/// Advances the states by one input without evaluating the head; used
/// when replaying history to warm up stateful models.
pub fn stack_advance(params: &LstmStackParams, states: &mut StackStates, x: &[f64]) -> Result<()> {
    check_input(params, x)?;
    check_states(params, states)?;
    let mut input = x.to_vec();
    for (layer, state) in params.layers.iter().zip(states.0.iter_mut()) {
        let cache = cell_step(layer, state, &input);
        input = cache.h.clone();
        *state = LayerState {
            c: cache.c.clone(),
            h: cache.h,
        };
    }
    Ok(())
}

/// Cached activations of a full window, consumed by the backward pass.
pub struct WindowCache {
    /// steps[t][j] is layer j at time t; x is the layer input after the
    /// dropout mask of the boundary below it.
    pub(crate) steps: Vec<Vec<StepCache>>,
    /// Inverted-dropout masks per layer boundary (between layer j and
    /// j + 1). One mask per window, scaled by 1/keep.
    pub(crate) masks: Vec<Option<Vec<f64>>>,
    pub(crate) head_input: Vec<f64>,
}

/// Result of evaluating a window: the final states, the head output at
/// the last step, and the cache.
pub struct WindowOutput {
    pub states: StackStates,
    pub logits: Vec<f64>,
    pub output: Vec<f64>,
    pub cache: WindowCache,
}

/// Applies the stack to every input in the window with shared weights.
/// Only the last step's head output is produced. When `dropout > 0`, a
/// fixed per-window inverted-dropout mask is applied to each layer's
/// output before the next layer (never on recurrent connections).
pub fn window_forward<R: Rng>(
    params: &LstmStackParams,
    init: &StackStates,
    inputs: &[Vec<f64>],
    dropout: f64,
    rng: &mut R,
) -> Result<WindowOutput> {
    if inputs.is_empty() {
        return Err(Error::EmptyWindow);
    }
    check_states(params, init)?;
    for x in inputs {
        check_input(params, x)?;
    }
    let layer_count = params.layers.len();
    let masks: Vec<Option<Vec<f64>>> = (0..layer_count.saturating_sub(1))
        .map(|j| {
            if dropout > 0.0 {
                let keep = 1.0 - dropout;
                let n = params.layers[j].cells();
                Some(
                    (0..n)
                        .map(|_| if rng.gen::<f64>() < keep { 1.0 / keep } else { 0.0 })
                        .collect(),
                )
            } else {
                None
            }
        })
        .collect();

    let mut states = init.clone();
    let mut steps = Vec::with_capacity(inputs.len());
    for x in inputs {
        let mut input = x.clone();
        let mut row = Vec::with_capacity(layer_count);
        for (j, (layer, state)) in params.layers.iter().zip(states.0.iter_mut()).enumerate() {
            let cache = cell_step(layer, state, &input);
            *state = LayerState {
                c: cache.c.clone(),
                h: cache.h.clone(),
            };
            input = cache.h.clone();
            if let Some(Some(mask)) = masks.get(j) {
                for (v, m) in input.iter_mut().zip(mask) {
                    *v *= m;
                }
            }
            row.push(cache);
        }
        steps.push(row);
    }

    let head_input = states.0[layer_count - 1].h.clone();
    let (logits, output) = head_output(params, &head_input);
    Ok(WindowOutput {
        states,
        logits,
        output,
        cache: WindowCache {
            steps,
            masks,
            head_input,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::neural::params::init_params;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn scalar_layer(weight: f64) -> LstmLayerParams {
        let mut l = LstmLayerParams::zeros(1, 1);
        for m in [&mut l.w_fx, &mut l.w_ix, &mut l.w_ox, &mut l.w_ux, &mut l.w_fh, &mut l.w_ih, &mut l.w_oh, &mut l.w_uh] {
            m.data_mut()[0] = weight;
        }
        l
    }

    #[test]
    fn zero_weights_give_half_gates_and_zero_states() {
        let l = LstmLayerParams::zeros(3, 2);
        let state = LayerState::zeros(3);
        let cache = cell_step(&l, &state, &[0.7, -0.3]);
        assert!(cache.f.iter().all(|&g| g == 0.5));
        assert!(cache.i.iter().all(|&g| g == 0.5));
        assert!(cache.o.iter().all(|&g| g == 0.5));
        assert!(cache.u.iter().all(|&g| g == 0.0));
        let new = cell_forward(&l, &state, &[0.7, -0.3]).unwrap();
        assert!(new.c.iter().all(|&v| v == 0.0));
        assert!(new.h.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn scalar_cell_oracle() {
        // n = d = 1, all weights 1, zero biases, x = 1, zero state:
        // f = i = o = sigmoid(1), u = tanh(1), c' = i*u, h' = o*tanh(c')
        let l = scalar_layer(1.0);
        let new = cell_forward(&l, &LayerState::zeros(1), &[1.0]).unwrap();
        let s = sigmoid(1.0);
        let u = 1.0f64.tanh();
        assert_relative_eq!(s, 0.7310585786300049, epsilon = 1e-15);
        assert_relative_eq!(u, 0.7615941559557649, epsilon = 1e-15);
        assert_relative_eq!(new.c[0], 0.5567699411459397, epsilon = 1e-12);
        assert_relative_eq!(new.h[0], 0.3696063529357058, epsilon = 1e-12);
    }

    #[test]
    fn saturated_forget_gate_accumulates() {
        // b_f = 50 saturates the forget gate to 1: c' ~ c + i*u
        let mut l = scalar_layer(0.0);
        l.b_f[0] = 50.0;
        l.b_i[0] = 50.0;
        l.w_ux.data_mut()[0] = 1.0;
        let state = LayerState {
            h: vec![0.0],
            c: vec![0.25],
        };
        let new = cell_forward(&l, &state, &[0.5]).unwrap();
        assert_relative_eq!(new.c[0], 0.25 + 0.5f64.tanh(), epsilon = 1e-12);
    }

    #[test]
    fn stack_forward_zero_head_outputs_zero() {
        let p = LstmStackParams::zeros(1, &[4], 1, HeadKind::Linear);
        let states = StackStates::zeros(&p);
        let (_, out) = stack_forward(&p, &states, &[0.9]).unwrap();
        assert_eq!(out, vec![0.0]);
    }

    #[test]
    fn softmax_head_uniform_on_zero_logits() {
        let p = LstmStackParams::zeros(1, &[4], 3, HeadKind::Softmax);
        let states = StackStates::zeros(&p);
        let (_, out) = stack_forward(&p, &states, &[0.9]).unwrap();
        for v in &out {
            assert_relative_eq!(*v, 1.0 / 3.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn window_of_one_step_equals_stack_forward() {
        let p = init_params(2, &[3, 3], 2, HeadKind::Softmax, 4);
        let states = StackStates::zeros(&p);
        let x = vec![0.4, -0.2];
        let (s1, out1) = stack_forward(&p, &states, &x).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let w = window_forward(&p, &states, &[x], 0.0, &mut rng).unwrap();
        assert_eq!(w.output, out1);
        assert_eq!(w.states, s1);
    }

    #[test]
    fn window_matches_repeated_scalar_oracle() {
        // a 3-step window of the all-ones scalar network must equal
        // three chained cell_forward evaluations plus the head
        let layer = scalar_layer(1.0);
        let mut p = LstmStackParams::zeros(1, &[1], 1, HeadKind::Linear);
        p.layers[0] = layer.clone();
        p.head.w.data_mut()[0] = 2.0;

        let inputs = vec![vec![1.0], vec![0.5], vec![-0.5]];
        let mut state = LayerState::zeros(1);
        for x in &inputs {
            state = cell_forward(&layer, &state, x).unwrap();
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let w = window_forward(&p, &StackStates::zeros(&p), &inputs, 0.0, &mut rng).unwrap();
        assert_relative_eq!(w.output[0], 2.0 * state.h[0], epsilon = 1e-14);
        assert_relative_eq!(w.states.0[0].h[0], state.h[0], epsilon = 1e-14);
    }

    #[test]
    fn zero_dropout_is_rng_independent() {
        let p = init_params(1, &[3, 3], 1, HeadKind::Linear, 8);
        let inputs = vec![vec![0.3], vec![0.6]];
        let a = window_forward(&p, &StackStates::zeros(&p), &inputs, 0.0, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        let b = window_forward(&p, &StackStates::zeros(&p), &inputs, 0.0, &mut ChaCha8Rng::seed_from_u64(999)).unwrap();
        assert_eq!(a.output, b.output);
    }

    #[test]
    fn empty_window_is_rejected() {
        let p = init_params(1, &[2], 1, HeadKind::Linear, 0);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(
            window_forward(&p, &StackStates::zeros(&p), &[], 0.0, &mut rng),
            Err(Error::EmptyWindow)
        ));
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let p = init_params(2, &[3], 1, HeadKind::Linear, 0);
        let err = stack_forward(&p, &StackStates::zeros(&p), &[1.0]).unwrap_err();
        assert!(err.to_string().contains("dimension mismatch"));
    }
}
