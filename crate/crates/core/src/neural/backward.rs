//! Backpropagation through time over one lag window.

use crate::neural::forward::WindowCache;
use crate::neural::params::LstmStackParams;

/// Exact gradients of the window loss with respect to every weight and
/// bias, accumulated additively across the window's time steps.
///
/// `dlogits` is the loss gradient with respect to the head's
/// pre-activation output at the last step: `2 (pred - target)` terms
/// for linear heads under squared error, `probs - onehot` for softmax
/// heads under cross entropy. Gradients with respect to the window's
/// initial states are computed internally and discarded, so no gradient
/// flows across window boundaries in stateful training.
pub fn backward_window(
    params: &LstmStackParams,
    cache: &WindowCache,
    dlogits: &[f64],
) -> LstmStackParams {
    assert_eq!(dlogits.len(), params.output_dim());
    let mut grads = params.zeros_like();
    let layer_count = params.layers.len();
    let steps = cache.steps.len();

    grads.head.w.add_outer(dlogits, &cache.head_input);
    for (g, d) in grads.head.b.iter_mut().zip(dlogits) {
        *g += d;
    }
    let mut head_grad = vec![0.0; params.layers[layer_count - 1].cells()];
    params.head.w.tr_matvec_add(dlogits, &mut head_grad);

    // gradients flowing into each layer's h and c from the next time step
    let mut carry_h: Vec<Vec<f64>> = params.layers.iter().map(|l| vec![0.0; l.cells()]).collect();
    let mut carry_c: Vec<Vec<f64>> = params.layers.iter().map(|l| vec![0.0; l.cells()]).collect();

    for t in (0..steps).rev() {
        // gradient flowing into the current layer's output from the
        // layer above at this same time step (already mask-scaled)
        let mut from_above: Option<Vec<f64>> = None;
        for j in (0..layer_count).rev() {
            let sc = &cache.steps[t][j];
            let layer = &params.layers[j];
            let g = &mut grads.layers[j];
            let n = layer.cells();

            let mut dh = std::mem::take(&mut carry_h[j]);
            if j == layer_count - 1 && t == steps - 1 {
                for (a, b) in dh.iter_mut().zip(&head_grad) {
                    *a += b;
                }
            }
            if let Some(above) = from_above.take() {
                for (a, b) in dh.iter_mut().zip(&above) {
                    *a += b;
                }
            }

            let mut dc = std::mem::take(&mut carry_c[j]);
            let mut df = vec![0.0; n];
            let mut di = vec![0.0; n];
            let mut do_ = vec![0.0; n];
            let mut du = vec![0.0; n];
            for k in 0..n {
                dc[k] += dh[k] * sc.o[k] * (1.0 - sc.tanh_c[k] * sc.tanh_c[k]);
                do_[k] = dh[k] * sc.tanh_c[k] * sc.o[k] * (1.0 - sc.o[k]);
                df[k] = dc[k] * sc.c_prev[k] * sc.f[k] * (1.0 - sc.f[k]);
                di[k] = dc[k] * sc.u[k] * sc.i[k] * (1.0 - sc.i[k]);
                du[k] = dc[k] * sc.i[k] * (1.0 - sc.u[k] * sc.u[k]);
            }

            g.w_fx.add_outer(&df, &sc.x);
            g.w_ix.add_outer(&di, &sc.x);
            g.w_ox.add_outer(&do_, &sc.x);
            g.w_ux.add_outer(&du, &sc.x);
            g.w_fh.add_outer(&df, &sc.h_prev);
            g.w_ih.add_outer(&di, &sc.h_prev);
            g.w_oh.add_outer(&do_, &sc.h_prev);
            g.w_uh.add_outer(&du, &sc.h_prev);
            for k in 0..n {
                g.b_f[k] += df[k];
                g.b_i[k] += di[k];
                g.b_o[k] += do_[k];
                g.b_u[k] += du[k];
                g.r_f[k] += df[k];
                g.r_i[k] += di[k];
                g.r_o[k] += do_[k];
                g.r_u[k] += du[k];
            }

            let mut dh_prev = vec![0.0; n];
            layer.w_fh.tr_matvec_add(&df, &mut dh_prev);
            layer.w_ih.tr_matvec_add(&di, &mut dh_prev);
            layer.w_oh.tr_matvec_add(&do_, &mut dh_prev);
            layer.w_uh.tr_matvec_add(&du, &mut dh_prev);
            carry_h[j] = dh_prev;

            let mut dc_prev = vec![0.0; n];
            for k in 0..n {
                dc_prev[k] = dc[k] * sc.f[k];
            }
            carry_c[j] = dc_prev;

            if j > 0 {
                let mut dx = vec![0.0; layer.input_dim()];
                layer.w_fx.tr_matvec_add(&df, &mut dx);
                layer.w_ix.tr_matvec_add(&di, &mut dx);
                layer.w_ox.tr_matvec_add(&do_, &mut dx);
                layer.w_ux.tr_matvec_add(&du, &mut dx);
                if let Some(Some(mask)) = cache.masks.get(j - 1) {
                    for (v, m) in dx.iter_mut().zip(mask) {
                        *v *= m;
                    }
                }
                from_above = Some(dx);
            }
        }
    }
    grads
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::neural::forward::window_forward;
    use crate::neural::params::{init_params, HeadKind, StackStates};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_loss_gradient_gives_zero_parameter_gradients() {
        let p = init_params(2, &[3, 2], 1, HeadKind::Linear, 1);
        let inputs = vec![vec![0.5, -0.5], vec![1.0, 0.0]];
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let w = window_forward(&p, &StackStates::zeros(&p), &inputs, 0.0, &mut rng).unwrap();
        let grads = backward_window(&p, &w.cache, &[0.0]);
        for t in grads.tensors() {
            assert!(t.iter().all(|&g| g == 0.0));
        }
    }

    #[test]
    fn linear_head_bias_gradient_equals_loss_derivative() {
        let p = init_params(1, &[3], 1, HeadKind::Linear, 2);
        let inputs = vec![vec![0.25]];
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let w = window_forward(&p, &StackStates::zeros(&p), &inputs, 0.0, &mut rng).unwrap();
        let grads = backward_window(&p, &w.cache, &[0.7]);
        assert_eq!(grads.head.b, vec![0.7]);
    }
}
