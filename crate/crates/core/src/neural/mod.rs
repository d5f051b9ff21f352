//! From-scratch LSTM engine: the literature-standard cell with a forget
//! gate and no peepholes, layer concatenation, multi-layer stacking,
//! dense output heads, losses, dropout, initialization, gradients by
//! backpropagation through time, and Adam.
//!
//! All arithmetic is 64-bit; training a single model is single-threaded
//! and fully determined by its seed.

pub mod adam;
pub mod backward;
pub mod checkpoint;
pub mod forward;
pub mod linalg;
pub mod loss;
pub mod params;

pub use adam::{AdamConfig, AdamState};
pub use backward::backward_window;
pub use checkpoint::{from_checkpoint_json, load_checkpoint, save_checkpoint, to_checkpoint_json};
pub use forward::{cell_forward, head_output, stack_advance, stack_forward, window_forward, WindowOutput};
pub use loss::{loss_mse, loss_mse_grad, loss_mse_vec, loss_xent, loss_xent_logit_grad, softmax};
pub use params::{
    init_params, DenseParams, HeadKind, LayerState, LstmLayerParams, LstmStackParams, StackStates,
};
