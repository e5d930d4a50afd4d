//! Dense tanh network with a normalisation front end and a hard-constraint
//! output layer, evaluated in batches with exact reverse-mode gradients.

use rand::Rng;

use super::basis::{ConstraintBasis, FREE_PARAMS};
use crate::error::{Error, Result};
use crate::schemes::{StencilWeights, STENCIL};

pub const DEFAULT_LAYERS: [usize; 4] = [STENCIL, 50, 50, FREE_PARAMS];

/// Parameters of a fully connected network, flattened layer by layer as
/// `[W^1 (row-major, out x in), b^1, W^2, b^2, ...]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel {
    layer_sizes: Vec<usize>,
    offsets: Vec<usize>,
    params: Vec<f64>,
}

impl MlpModel {
    pub fn zeros(layer_sizes: &[usize]) -> Result<Self> {
        if layer_sizes.len() < 2 || layer_sizes[0] != STENCIL || *layer_sizes.last().unwrap() != FREE_PARAMS {
            return Err(Error::ShapeMismatch {
                expected: format!("layers {STENCIL},...,{FREE_PARAMS}"),
                found: format!("{layer_sizes:?}"),
            });
        }
        if layer_sizes.contains(&0) {
            return Err(Error::InvalidArgument("empty layer".into()));
        }
        let mut offsets = vec![0];
        for w in layer_sizes.windows(2) {
            let last = *offsets.last().unwrap();
            offsets.push(last + w[0] * w[1] + w[1]);
        }
        let n = *offsets.last().unwrap();
        Ok(Self { layer_sizes: layer_sizes.to_vec(), offsets, params: vec![0.0; n] })
    }

    /// Glorot-uniform hidden weights, zero biases and a zero output layer,
    /// so the untrained network emits the feasible point `w*` exactly.
    pub fn init<R: Rng + ?Sized>(layer_sizes: &[usize], rng: &mut R) -> Result<Self> {
        let mut model = Self::zeros(layer_sizes)?;
        for s in 0..model.n_layers() - 1 {
            let (fan_in, fan_out) = (model.layer_sizes[s], model.layer_sizes[s + 1]);
            let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
            for w in model.weights_mut(s) {
                *w = rng.gen_range(-limit..limit);
            }
        }
        Ok(model)
    }

    pub fn layer_sizes(&self) -> &[usize] {
        &self.layer_sizes
    }

    pub fn n_layers(&self) -> usize {
        self.layer_sizes.len() - 1
    }

    pub fn n_params(&self) -> usize {
        self.params.len()
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    fn weight_range(&self, s: usize) -> std::ops::Range<usize> {
        let start = self.offsets[s];
        start..start + self.layer_sizes[s] * self.layer_sizes[s + 1]
    }

    fn bias_range(&self, s: usize) -> std::ops::Range<usize> {
        let end = self.offsets[s + 1];
        end - self.layer_sizes[s + 1]..end
    }

    pub fn weights(&self, s: usize) -> &[f64] {
        &self.params[self.weight_range(s)]
    }

    pub fn weights_mut(&mut self, s: usize) -> &mut [f64] {
        let r = self.weight_range(s);
        &mut self.params[r]
    }

    pub fn bias(&self, s: usize) -> &[f64] {
        &self.params[self.bias_range(s)]
    }

    pub fn bias_mut(&mut self, s: usize) -> &mut [f64] {
        let r = self.bias_range(s);
        &mut self.params[r]
    }
}

/// Map a stencil affinely onto `[0, 1]`; a flat stencil maps to all ones.
pub fn normalize_stencil(f: &[f64; STENCIL]) -> [f64; STENCIL] {
    let mut out = [1.0; STENCIL];
    normalize_into(f, &mut out);
    out
}

#[inline]
fn normalize_into(f: &[f64; STENCIL], out: &mut [f64]) {
    let (mut lo, mut hi) = (f[0], f[0]);
    for &v in &f[1..] {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    let range = hi - lo;
    if range > 1e-300 {
        for l in 0..STENCIL {
            out[l] = (f[l] - lo) / range;
        }
    } else {
        out[..STENCIL].fill(1.0);
    }
}

/// The weight-learning network: an MLP followed by `w = w* + sum s_j v_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct WlnnModel {
    pub mlp: MlpModel,
    pub basis: ConstraintBasis,
}

/// Activations retained between a batched forward pass and its backward pass.
#[derive(Debug, Default, Clone)]
pub struct Batch {
    rows: usize,
    input: Vec<f64>,
    acts: Vec<Vec<f64>>,
    weights: Vec<f64>,
    delta: Vec<f64>,
    delta_next: Vec<f64>,
}

impl Batch {
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Output weights, `rows x 6` row-major.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn row_weights(&self, r: usize) -> [f64; STENCIL] {
        let mut w = [0.0; STENCIL];
        w.copy_from_slice(&self.weights[r * STENCIL..(r + 1) * STENCIL]);
        w
    }
}

/// `c = a * w^T (+ beta c)` with `a: m x k`, `w: n x k`, `c: m x n`, all row-major.
fn gemm_abt(m: usize, k: usize, n: usize, a: &[f64], w: &[f64], beta: f64, c: &mut [f64]) {
    unsafe {
        matrixmultiply::dgemm(
            m, k, n, 1.0,
            a.as_ptr(), k as isize, 1,
            w.as_ptr(), 1, k as isize,
            beta,
            c.as_mut_ptr(), n as isize, 1,
        );
    }
}

/// `c = a * b` with `a: m x k`, `b: k x n`.
fn gemm_ab(m: usize, k: usize, n: usize, a: &[f64], b: &[f64], c: &mut [f64]) {
    unsafe {
        matrixmultiply::dgemm(
            m, k, n, 1.0,
            a.as_ptr(), k as isize, 1,
            b.as_ptr(), n as isize, 1,
            0.0,
            c.as_mut_ptr(), n as isize, 1,
        );
    }
}

/// `c += a^T * b` with `a: m x n`, `b: m x k`, `c: n x k`.
fn gemm_atb_acc(m: usize, n: usize, k: usize, a: &[f64], b: &[f64], c: &mut [f64]) {
    unsafe {
        matrixmultiply::dgemm(
            n, m, k, 1.0,
            a.as_ptr(), 1, n as isize,
            b.as_ptr(), k as isize, 1,
            1.0,
            c.as_mut_ptr(), k as isize, 1,
        );
    }
}

impl WlnnModel {
    pub fn new(mlp: MlpModel) -> Self {
        Self { mlp, basis: ConstraintBasis::build() }
    }

    pub fn init<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self::new(MlpModel::init(&DEFAULT_LAYERS, rng).expect("default layers are valid"))
    }

    pub fn n_params(&self) -> usize {
        self.mlp.n_params()
    }

    /// Weights for one stencil.
    pub fn forward(&self, f: &[f64; STENCIL]) -> StencilWeights {
        let mut batch = Batch::default();
        self.forward_batch(std::slice::from_ref(f), &mut batch);
        StencilWeights::from_constructed(batch.row_weights(0))
    }

    pub fn forward_batch(&self, stencils: &[[f64; STENCIL]], batch: &mut Batch) {
        let rows = stencils.len();
        batch.input.resize(rows * STENCIL, 0.0);
        for (r, f) in stencils.iter().enumerate() {
            normalize_into(f, &mut batch.input[r * STENCIL..(r + 1) * STENCIL]);
        }
        self.propagate(rows, batch);
    }

    fn propagate(&self, rows: usize, batch: &mut Batch) {
        let mlp = &self.mlp;
        let n_layers = mlp.n_layers();
        batch.rows = rows;
        batch.acts.resize_with(n_layers, Vec::new);
        for s in 0..n_layers {
            let (fan_in, fan_out) = (mlp.layer_sizes[s], mlp.layer_sizes[s + 1]);
            let (prev, rest) = batch.acts.split_at_mut(s);
            let out = &mut rest[0];
            out.resize(rows * fan_out, 0.0);
            let bias = mlp.bias(s);
            for row in out.chunks_exact_mut(fan_out) {
                row.copy_from_slice(bias);
            }
            let input: &[f64] = if s == 0 { &batch.input } else { &prev[s - 1] };
            gemm_abt(rows, fan_in, fan_out, input, mlp.weights(s), 1.0, out);
            if s + 1 < n_layers {
                out.iter_mut().for_each(|v| *v = v.tanh());
            }
        }

        // Hard-constraint layer.
        let s_out = &batch.acts[n_layers - 1];
        batch.weights.resize(rows * STENCIL, 0.0);
        for row in batch.weights.chunks_exact_mut(STENCIL) {
            row.copy_from_slice(&self.basis.w_star);
        }
        let v = self.basis.v_flat();
        unsafe {
            matrixmultiply::dgemm(
                rows, FREE_PARAMS, STENCIL, 1.0,
                s_out.as_ptr(), FREE_PARAMS as isize, 1,
                v.as_ptr(), STENCIL as isize, 1,
                1.0,
                batch.weights.as_mut_ptr(), STENCIL as isize, 1,
            );
        }
    }

    /// Accumulate into `grad` the parameter gradient of `sum_r dL/dw_r . w_r`
    /// for the batch last passed through [`forward_batch`](Self::forward_batch).
    /// The stencil inputs are treated as data.
    pub fn backward_batch(&self, batch: &mut Batch, d_weights: &[f64], grad: &mut [f64]) -> Result<()> {
        let rows = batch.rows;
        if d_weights.len() != rows * STENCIL {
            return Err(Error::ShapeMismatch {
                expected: format!("{} weight gradients", rows * STENCIL),
                found: d_weights.len().to_string(),
            });
        }
        if grad.len() != self.n_params() {
            return Err(Error::ShapeMismatch {
                expected: format!("{} parameters", self.n_params()),
                found: grad.len().to_string(),
            });
        }
        let mlp = &self.mlp;
        let n_layers = mlp.n_layers();

        // dL/ds = dL/dw * V^T
        batch.delta.resize(rows * FREE_PARAMS, 0.0);
        let v = self.basis.v_flat();
        gemm_abt(rows, STENCIL, FREE_PARAMS, d_weights, &v, 0.0, &mut batch.delta);

        for s in (0..n_layers).rev() {
            let (fan_in, fan_out) = (mlp.layer_sizes[s], mlp.layer_sizes[s + 1]);
            let input: &[f64] = if s == 0 { &batch.input } else { &batch.acts[s - 1] };
            let wr = mlp.weight_range(s);
            let br = mlp.bias_range(s);
            gemm_atb_acc(rows, fan_out, fan_in, &batch.delta, input, &mut grad[wr]);
            let gb = &mut grad[br];
            for row in batch.delta.chunks_exact(fan_out) {
                for (g, d) in gb.iter_mut().zip(row) {
                    *g += d;
                }
            }
            if s == 0 {
                break;
            }
            batch.delta_next.resize(rows * fan_in, 0.0);
            gemm_ab(rows, fan_out, fan_in, &batch.delta, mlp.weights(s), &mut batch.delta_next);
            for (d, a) in batch.delta_next.iter_mut().zip(&batch.acts[s - 1]) {
                *d *= 1.0 - a * a;
            }
            std::mem::swap(&mut batch.delta, &mut batch.delta_next);
        }
        Ok(())
    }

    /// Parameter gradient for a single stencil.
    pub fn backward(&self, f: &[f64; STENCIL], d_weights: &[f64]) -> Result<Vec<f64>> {
        let mut batch = Batch::default();
        self.forward_batch(std::slice::from_ref(f), &mut batch);
        let mut grad = vec![0.0; self.n_params()];
        self.backward_batch(&mut batch, d_weights, &mut grad)?;
        Ok(grad)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schemes::{ce6_weights, MOMENT_COEFFS};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_model(seed: u64) -> WlnnModel {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = WlnnModel::init(&mut rng);
        for p in m.mlp.params_mut() {
            *p += rng.gen_range(-0.5..0.5);
        }
        m
    }

    #[test]
    fn normalization_examples() {
        assert_eq!(
            normalize_stencil(&[0.0, 1.0, 2.0, 3.0, 4.0, 5.0]),
            [0.0, 0.2, 0.4, 0.6, 0.8, 1.0]
        );
        assert_eq!(normalize_stencil(&[3.0; 6]), [1.0; 6]);
        assert_eq!(normalize_stencil(&[1e-320, 0.0, 0.0, 0.0, 0.0, 0.0]), [1.0; 6]);
    }

    #[test]
    fn untrained_network_emits_ce6() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = WlnnModel::init(&mut rng);
        let w = m.forward(&[0.3, -1.0, 2.0, 0.1, 0.0, 5.0]);
        assert_eq!(w.as_array(), ce6_weights().as_array());
    }

    #[test]
    fn affine_invariance() {
        let m = random_model(2);
        let f = [0.3, -1.0, 2.0, 0.1, 0.0, 5.0];
        let g = f.map(|v| 2.0 * v + 1.0);
        let (wf, wg) = (m.forward(&f), m.forward(&g));
        for l in 0..6 {
            assert!((wf.as_array()[l] - wg.as_array()[l]).abs() < 1e-14);
        }
    }

    #[test]
    fn batch_matches_single() {
        let m = random_model(3);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let stencils: Vec<[f64; 6]> = (0..37).map(|_| std::array::from_fn(|_| rng.gen_range(-1.0..1.0))).collect();
        let mut batch = Batch::default();
        m.forward_batch(&stencils, &mut batch);
        for (r, f) in stencils.iter().enumerate() {
            let single = m.forward(f);
            for l in 0..6 {
                assert!((batch.row_weights(r)[l] - single.as_array()[l]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn zero_upstream_gradient_gives_zero() {
        let m = random_model(5);
        let g = m.backward(&[0.1, 0.5, 0.2, 0.9, 0.3, 0.0], &[0.0; 6]).unwrap();
        assert!(g.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn shape_mismatch_rejected() {
        let m = random_model(5);
        assert!(m.backward(&[0.0; 6], &[0.0; 5]).is_err());
        assert!(MlpModel::zeros(&[6, 10, 3]).is_err());
    }

    #[test]
    fn gradient_orthogonal_to_null_space_vanishes() {
        // Upstream gradient along the constraint rows cannot move w.
        let m = random_model(6);
        let f = [0.1, 0.5, 0.2, 0.9, 0.3, 0.0];
        for dir in [[1.0; 6], MOMENT_COEFFS] {
            let g = m.backward(&f, &dir).unwrap();
            assert!(g.iter().all(|v| v.abs() < 1e-12));
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let m = random_model(7);
        let f = [0.1, 0.5, 0.2, 0.9, 0.3, 0.0];
        let upstream = [0.3, -0.2, 0.5, 0.1, -0.7, 0.4];
        let loss = |model: &WlnnModel| -> f64 {
            model.forward(&f).as_array().iter().zip(&upstream).map(|(w, d)| w * d).sum()
        };
        let grad = m.backward(&f, &upstream).unwrap();
        let h = 1e-6;
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..100 {
            let p = rng.gen_range(0..m.n_params());
            let mut plus = m.clone();
            plus.mlp.params_mut()[p] += h;
            let mut minus = m.clone();
            minus.mlp.params_mut()[p] -= h;
            let fd = (loss(&plus) - loss(&minus)) / (2.0 * h);
            let scale = fd.abs().max(grad[p].abs()).max(1e-6);
            assert!((fd - grad[p]).abs() / scale < 1e-5, "param {p}: fd {fd} vs {}", grad[p]);
        }
    }
}
