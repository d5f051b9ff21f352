//! Parameter containers for the LSTM stack and their initialization.
//!
//! Every gate carries two bias vectors, one entering with the input
//! product and one with the recurrent product, matching fused
//! implementations that keep separate input/recurrent bias terms. The
//! two are mathematically redundant but contribute to the parameter
//! count, giving `4 * ((d + n) * n + 2n)` parameters per layer.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::neural::linalg::{random_orthogonal, Mat};

/// Weights of one LSTM layer of `n` cells over inputs of dimension `d`.
///
/// `f`/`i`/`o` are the forget, input and output gates; `u` is the tanh
/// cell update. `w_*x` are input weights (n x d), `w_*h` recurrent
/// weights (n x n), `b_*` input biases and `r_*` recurrent biases.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LstmLayerParams {
    pub w_fx: Mat,
    pub w_ix: Mat,
    pub w_ox: Mat,
    pub w_ux: Mat,
    pub w_fh: Mat,
    pub w_ih: Mat,
    pub w_oh: Mat,
    pub w_uh: Mat,
    pub b_f: Vec<f64>,
    pub b_i: Vec<f64>,
    pub b_o: Vec<f64>,
    pub b_u: Vec<f64>,
    pub r_f: Vec<f64>,
    pub r_i: Vec<f64>,
    pub r_o: Vec<f64>,
    pub r_u: Vec<f64>,
}

impl LstmLayerParams {
    pub fn zeros(cells: usize, input_dim: usize) -> Self {
        Self {
            w_fx: Mat::zeros(cells, input_dim),
            w_ix: Mat::zeros(cells, input_dim),
            w_ox: Mat::zeros(cells, input_dim),
            w_ux: Mat::zeros(cells, input_dim),
            w_fh: Mat::zeros(cells, cells),
            w_ih: Mat::zeros(cells, cells),
            w_oh: Mat::zeros(cells, cells),
            w_uh: Mat::zeros(cells, cells),
            b_f: vec![0.0; cells],
            b_i: vec![0.0; cells],
            b_o: vec![0.0; cells],
            b_u: vec![0.0; cells],
            r_f: vec![0.0; cells],
            r_i: vec![0.0; cells],
            r_o: vec![0.0; cells],
            r_u: vec![0.0; cells],
        }
    }

    pub fn cells(&self) -> usize {
        self.w_fh.rows()
    }

    pub fn input_dim(&self) -> usize {
        self.w_fx.cols()
    }

    pub fn parameter_count(&self) -> usize {
        let n = self.cells();
        let d = self.input_dim();
        4 * ((d + n) * n + 2 * n)
    }
}

/// Dense output head: W (out x in) and bias.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DenseParams {
    pub w: Mat,
    pub b: Vec<f64>,
}

impl DenseParams {
    pub fn zeros(outputs: usize, inputs: usize) -> Self {
        Self {
            w: Mat::zeros(outputs, inputs),
            b: vec![0.0; outputs],
        }
    }

    pub fn outputs(&self) -> usize {
        self.w.rows()
    }

    pub fn parameter_count(&self) -> usize {
        self.w.rows() * self.w.cols() + self.b.len()
    }
}

/// Activation applied by the output head.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum HeadKind {
    /// Naked neurons with no activation; used for numeric forecasts.
    Linear,
    /// Softmax over the alphabet; used for symbolic forecasts.
    Softmax,
}

/// All weights of a multi-layer LSTM plus its output head; the
/// trainable object.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LstmStackParams {
    pub layers: Vec<LstmLayerParams>,
    pub head: DenseParams,
    pub head_kind: HeadKind,
}

impl LstmStackParams {
    pub fn zeros(input_dim: usize, layer_cells: &[usize], head_outputs: usize, head_kind: HeadKind) -> Self {
        assert!(!layer_cells.is_empty());
        let mut layers = Vec::with_capacity(layer_cells.len());
        let mut d = input_dim;
        for &n in layer_cells {
            layers.push(LstmLayerParams::zeros(n, d));
            d = n;
        }
        Self {
            layers,
            head: DenseParams::zeros(head_outputs, d),
            head_kind,
        }
    }

    pub fn zeros_like(&self) -> Self {
        let cells: Vec<usize> = self.layers.iter().map(|l| l.cells()).collect();
        Self::zeros(
            self.input_dim(),
            &cells,
            self.head.outputs(),
            self.head_kind,
        )
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].input_dim()
    }

    pub fn output_dim(&self) -> usize {
        self.head.outputs()
    }

    /// Total number of scalar parameters, counting the dual biases.
    pub fn parameter_count(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.parameter_count())
            .sum::<usize>()
            + self.head.parameter_count()
    }

    /// All tensors in a fixed, documented order (per layer: the four
    /// input-weight matrices, four recurrent matrices, four input
    /// biases, four recurrent biases; then head weight and bias). The
    /// gradient, moment and checkpoint code all rely on this order.
    pub fn tensors(&self) -> Vec<&[f64]> {
        let mut out = Vec::new();
        for l in &self.layers {
            out.push(l.w_fx.data());
            out.push(l.w_ix.data());
            out.push(l.w_ox.data());
            out.push(l.w_ux.data());
            out.push(l.w_fh.data());
            out.push(l.w_ih.data());
            out.push(l.w_oh.data());
            out.push(l.w_uh.data());
            out.push(&l.b_f);
            out.push(&l.b_i);
            out.push(&l.b_o);
            out.push(&l.b_u);
            out.push(&l.r_f);
            out.push(&l.r_i);
            out.push(&l.r_o);
            out.push(&l.r_u);
        }
        out.push(self.head.w.data());
        out.push(&self.head.b);
        out
    }

    pub fn tensors_mut(&mut self) -> Vec<&mut [f64]> {
        let mut out: Vec<&mut [f64]> = Vec::new();
        for l in &mut self.layers {
            out.push(l.w_fx.data_mut());
            out.push(l.w_ix.data_mut());
            out.push(l.w_ox.data_mut());
            out.push(l.w_ux.data_mut());
            out.push(l.w_fh.data_mut());
            out.push(l.w_ih.data_mut());
            out.push(l.w_oh.data_mut());
            out.push(l.w_uh.data_mut());
            out.push(&mut l.b_f);
            out.push(&mut l.b_i);
            out.push(&mut l.b_o);
            out.push(&mut l.b_u);
            out.push(&mut l.r_f);
            out.push(&mut l.r_i);
            out.push(&mut l.r_o);
            out.push(&mut l.r_u);
        }
        out.push(self.head.w.data_mut());
        out.push(&mut self.head.b);
        out
    }

    /// Named tensors with shapes, in the same order as [`tensors`],
    /// used by the checkpoint format.
    pub fn named_shapes(&self) -> Vec<(String, Vec<usize>)> {
        let mut out = Vec::new();
        for (idx, l) in self.layers.iter().enumerate() {
            let n = l.cells();
            let d = l.input_dim();
            for name in ["w_fx", "w_ix", "w_ox", "w_ux"] {
                out.push((format!("layer{idx}.{name}"), vec![n, d]));
            }
            for name in ["w_fh", "w_ih", "w_oh", "w_uh"] {
                out.push((format!("layer{idx}.{name}"), vec![n, n]));
            }
            for name in ["b_f", "b_i", "b_o", "b_u", "r_f", "r_i", "r_o", "r_u"] {
                out.push((format!("layer{idx}.{name}"), vec![n]));
            }
        }
        out.push((
            "head.w".to_string(),
            vec![self.head.w.rows(), self.head.w.cols()],
        ));
        out.push(("head.b".to_string(), vec![self.head.b.len()]));
        out
    }
}

fn xavier_bound(fan_in: usize, fan_out: usize) -> f64 {
    (6.0 / (fan_in + fan_out) as f64).sqrt()
}

fn xavier_mat<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> Mat {
    let bound = xavier_bound(cols, rows);
    Mat::from_fn(rows, cols, |_, _| rng.gen_range(-bound..bound))
}

/// Initializes a stack: recurrent matrices as random orthogonal
/// matrices, input and head weights Xavier-uniform, all biases zero.
/// Deterministic per seed.
pub fn init_params(
    input_dim: usize,
    layer_cells: &[usize],
    head_outputs: usize,
    head_kind: HeadKind,
    seed: u64,
) -> LstmStackParams {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut params = LstmStackParams::zeros(input_dim, layer_cells, head_outputs, head_kind);
    for layer in &mut params.layers {
        let n = layer.cells();
        let d = layer.input_dim();
        layer.w_fx = xavier_mat(n, d, &mut rng);
        layer.w_ix = xavier_mat(n, d, &mut rng);
        layer.w_ox = xavier_mat(n, d, &mut rng);
        layer.w_ux = xavier_mat(n, d, &mut rng);
        layer.w_fh = random_orthogonal(n, &mut rng);
        layer.w_ih = random_orthogonal(n, &mut rng);
        layer.w_oh = random_orthogonal(n, &mut rng);
        layer.w_uh = random_orthogonal(n, &mut rng);
    }
    let (out, inp) = (params.head.w.rows(), params.head.w.cols());
    params.head.w = xavier_mat(out, inp, &mut rng);
    params
}

/// Hidden and cell state of one layer. The hidden state is always in
/// [-1, 1]; the cell state stays there in practice but is not clamped.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayerState {
    pub h: Vec<f64>,
    pub c: Vec<f64>,
}

impl LayerState {
    pub fn zeros(cells: usize) -> Self {
        Self {
            h: vec![0.0; cells],
            c: vec![0.0; cells],
        }
    }
}

/// Per-layer states of the whole stack.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StackStates(pub Vec<LayerState>);

impl StackStates {
    pub fn zeros(params: &LstmStackParams) -> Self {
        Self(
            params
                .layers
                .iter()
                .map(|l| LayerState::zeros(l.cells()))
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::neural::linalg::orthogonality_defect;

    #[test]
    fn parameter_count_golden_values() {
        // raw configuration: scalar input, two layers of 50, linear head
        let raw = LstmStackParams::zeros(1, &[50, 50], 1, HeadKind::Linear);
        assert_eq!(raw.parameter_count(), 31051);

        // symbolic configuration: 9-symbol one-hot, softmax head of 9
        let sym = LstmStackParams::zeros(9, &[50, 50], 9, HeadKind::Softmax);
        assert_eq!(sym.parameter_count(), 33059);

        // tiny analytic case: 4*((1+2)*2 + 2*2) + (2+1)
        let tiny = LstmStackParams::zeros(1, &[2], 1, HeadKind::Linear);
        assert_eq!(tiny.parameter_count(), 43);
    }

    #[test]
    fn init_is_seed_deterministic() {
        let a = init_params(3, &[4, 5], 2, HeadKind::Softmax, 11);
        let b = init_params(3, &[4, 5], 2, HeadKind::Softmax, 11);
        assert_eq!(a, b);
        let c = init_params(3, &[4, 5], 2, HeadKind::Softmax, 12);
        assert_ne!(a, c);
    }

    #[test]
    fn init_recurrent_matrices_are_orthogonal() {
        let p = init_params(1, &[20, 20], 1, HeadKind::Linear, 5);
        for layer in &p.layers {
            for m in [&layer.w_fh, &layer.w_ih, &layer.w_oh, &layer.w_uh] {
                assert!(orthogonality_defect(m) <= 1e-10);
            }
        }
    }

    #[test]
    fn init_respects_xavier_bound_and_zero_biases() {
        let p = init_params(50, &[50], 1, HeadKind::Linear, 2);
        let bound = (6.0f64 / 100.0).sqrt(); // 0.24495 for fan 50/50
        for v in p.layers[0].w_fx.data() {
            assert!(v.abs() < bound);
        }
        assert!(p.layers[0].b_f.iter().all(|&b| b == 0.0));
        assert!(p.layers[0].r_u.iter().all(|&b| b == 0.0));
        assert!(p.head.b.iter().all(|&b| b == 0.0));
    }

    #[test]
    fn tensors_cover_every_parameter() {
        let p = LstmStackParams::zeros(2, &[3, 4], 2, HeadKind::Softmax);
        let total: usize = p.tensors().iter().map(|t| t.len()).sum();
        assert_eq!(total, p.parameter_count());
        let names = p.named_shapes();
        assert_eq!(names.len(), p.tensors().len());
        for ((_, shape), t) in names.iter().zip(p.tensors()) {
            assert_eq!(shape.iter().product::<usize>(), t.len());
        }
    }
}
