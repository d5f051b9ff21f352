//! Finite-difference verification of the backpropagation-through-time
//! gradients on small random instances.

use abba_lstm::neural::backward::backward_window;
use abba_lstm::neural::forward::window_forward;
use abba_lstm::neural::loss::{loss_mse, loss_mse_grad, loss_xent, loss_xent_logit_grad};
use abba_lstm::neural::params::{init_params, HeadKind, LstmStackParams, StackStates};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn window_loss(params: &LstmStackParams, inputs: &[Vec<f64>], target: &Target) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let out = window_forward(params, &StackStates::zeros(params), inputs, 0.0, &mut rng).unwrap();
    match target {
        Target::Scalar(t) => loss_mse(out.output[0], *t),
        Target::Class(c) => loss_xent(&out.output, *c),
    }
}

enum Target {
    Scalar(f64),
    Class(usize),
}

/// Central finite differences with step 1e-5; each gradient must agree
/// within 1e-4 relative error with a 1e-7 absolute floor.
fn check_instance(seed: u64, head: HeadKind) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = rng.gen_range(1..=3);
    let n1 = rng.gen_range(1..=4);
    let n2 = rng.gen_range(1..=4);
    let steps = rng.gen_range(1..=5);
    let outputs = match head {
        HeadKind::Linear => 1,
        HeadKind::Softmax => d,
    };
    let mut params = init_params(d, &[n1, n2], outputs, head, seed ^ 0xABCD);
    // nonzero biases exercise every gradient path
    for t in params.tensors_mut() {
        for v in t {
            if *v == 0.0 {
                *v = rng.gen_range(-0.3..0.3);
            }
        }
    }
    let inputs: Vec<Vec<f64>> = (0..steps)
        .map(|_| (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    let target = match head {
        HeadKind::Linear => Target::Scalar(rng.gen_range(-1.0..1.0)),
        HeadKind::Softmax => Target::Class(rng.gen_range(0..outputs)),
    };

    let mut rng0 = ChaCha8Rng::seed_from_u64(0);
    let out = window_forward(&params, &StackStates::zeros(&params), &inputs, 0.0, &mut rng0).unwrap();
    let dlogits = match &target {
        Target::Scalar(t) => vec![loss_mse_grad(out.output[0], *t)],
        Target::Class(c) => loss_xent_logit_grad(&out.output, *c),
    };
    let analytic = backward_window(&params, &out.cache, &dlogits);

    let h = 1e-5;
    let tensor_count = analytic.tensors().len();
    for ti in 0..tensor_count {
        for k in 0..analytic.tensors()[ti].len() {
            let orig = params.tensors()[ti][k];
            params.tensors_mut()[ti][k] = orig + h;
            let up = window_loss(&params, &inputs, &target);
            params.tensors_mut()[ti][k] = orig - h;
            let down = window_loss(&params, &inputs, &target);
            params.tensors_mut()[ti][k] = orig;

            let numeric = (up - down) / (2.0 * h);
            let exact = analytic.tensors()[ti][k];
            let err = (numeric - exact).abs();
            let scale = exact.abs().max(numeric.abs());
            assert!(
                err <= (1e-4 * scale).max(1e-7),
                "seed {seed} tensor {ti} index {k}: analytic {exact} vs numeric {numeric}"
            );
        }
    }
}

#[test]
fn gradients_match_finite_differences_linear_head() {
    for seed in 0..4 {
        check_instance(seed, HeadKind::Linear);
    }
}

#[test]
fn gradients_match_finite_differences_softmax_head() {
    for seed in 100..104 {
        check_instance(seed, HeadKind::Softmax);
    }
}

#[test]
fn gradients_match_finite_differences_with_dropout_mask() {
    // with a fixed mask the masked network is still a differentiable
    // function; verify the mask is honored in the backward pass by
    // training-style forward with dropout and comparing against finite
    // differences of the same masked evaluation
    let seed = 7u64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let params = init_params(2, &[3, 3], 1, HeadKind::Linear, 42);
    let inputs: Vec<Vec<f64>> = (0..4)
        .map(|_| (0..2).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    let target = 0.3;

    // the mask depends only on the rng state at call time
    let mut fwd_rng = ChaCha8Rng::seed_from_u64(99);
    let out = window_forward(&params, &StackStates::zeros(&params), &inputs, 0.5, &mut fwd_rng).unwrap();
    let dlogits = vec![loss_mse_grad(out.output[0], target)];
    let analytic = backward_window(&params, &out.cache, &dlogits);

    let masked_loss = |p: &LstmStackParams| {
        let mut r = ChaCha8Rng::seed_from_u64(99);
        let o = window_forward(p, &StackStates::zeros(p), &inputs, 0.5, &mut r).unwrap();
        loss_mse(o.output[0], target)
    };

    let h = 1e-5;
    let mut p = params.clone();
    let tensor_count = analytic.tensors().len();
    for ti in 0..tensor_count {
        for k in 0..analytic.tensors()[ti].len() {
            let orig = p.tensors()[ti][k];
            p.tensors_mut()[ti][k] = orig + h;
            let up = masked_loss(&p);
            p.tensors_mut()[ti][k] = orig - h;
            let down = masked_loss(&p);
            p.tensors_mut()[ti][k] = orig;
            let numeric = (up - down) / (2.0 * h);
            let exact = analytic.tensors()[ti][k];
            let err = (numeric - exact).abs();
            assert!(
                err <= (1e-4 * exact.abs().max(numeric.abs())).max(1e-7),
                "tensor {ti} index {k}: analytic {exact} vs numeric {numeric}"
            );
        }
    }
}
