//! Dense networks with hand-written backpropagation.
//!
//! An [`Mlp`] is an ordered list of [`Layer`]s whose parameters live in one
//! flat `Vec<f64>` in declaration order (for a dense layer: weights row-major
//! `out x in`, then biases; for layer norm: gains, then biases). Gradients,
//! Adam moments, target-network averaging and checkpoints all use the same
//! flat layout.
//!
//! Batches are row-major [`Matrix`] values with one example per row.

use std::io::{Read, Write};
use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};

use rand::Rng as _;

use crate::error::{Error, Result};
use crate::rng::Rng;

pub const LAYER_NORM_EPS: f64 = 1e-5;

const CHECKPOINT_MAGIC: &[u8; 8] = b"DISRCNN\x01";

static NEXT_VERSION: AtomicU64 = AtomicU64::new(1);

fn next_version() -> u64 {
    NEXT_VERSION.fetch_add(1, Ordering::Relaxed)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::shape(
                format!("{rows}x{cols}"),
                format!("{} values", data.len()),
            ));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::shape(
                    format!("row of {cols}"),
                    format!("row of {}", r.len()),
                ));
            }
            data.extend_from_slice(r);
        }
        Ok(Matrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn row_vector(values: &[f64]) -> Self {
        Matrix {
            rows: 1,
            cols: values.len(),
            data: values.to_vec(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }
}

/// `c = a * b (+ c if accumulate)` where `a` is `m x k` and `b` is `k x n`,
/// each given with explicit row/column strides.
#[allow(clippy::too_many_arguments)]
fn gemm(
    m: usize,
    k: usize,
    n: usize,
    a: &[f64],
    (rsa, csa): (usize, usize),
    b: &[f64],
    (rsb, csb): (usize, usize),
    c: &mut [f64],
    accumulate: bool,
) {
    debug_assert!(m == 0 || k == 0 || a.len() > (m - 1) * rsa + (k - 1) * csa);
    debug_assert!(k == 0 || n == 0 || b.len() > (k - 1) * rsb + (n - 1) * csb);
    debug_assert!(c.len() >= m * n);
    let beta = if accumulate { 1.0 } else { 0.0 };
    // SAFETY: the slices cover every element addressed by the given
    // dimensions and strides (checked above in debug builds and guaranteed
    // by the callers' shape checks), and `c` does not alias `a` or `b`.
    unsafe {
        matrixmultiply::dgemm(
            m,
            k,
            n,
            1.0,
            a.as_ptr(),
            rsa as isize,
            csa as isize,
            b.as_ptr(),
            rsb as isize,
            csb as isize,
            beta,
            c.as_mut_ptr(),
            n as isize,
            1,
        );
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Layer {
    /// `y = W x + b`; parameters start at `offset` (weights `output x input`, then bias).
    Dense {
        input: usize,
        output: usize,
        offset: usize,
    },
    /// Per-example normalization with learned gain and bias.
    LayerNorm {
        dim: usize,
        eps: f64,
        offset: usize,
    },
    Relu {
        dim: usize,
    },
}

impl Layer {
    pub fn input_dim(&self) -> usize {
        match *self {
            Layer::Dense { input, .. } => input,
            Layer::LayerNorm { dim, .. } | Layer::Relu { dim } => dim,
        }
    }

    pub fn output_dim(&self) -> usize {
        match *self {
            Layer::Dense { output, .. } => output,
            Layer::LayerNorm { dim, .. } | Layer::Relu { dim } => dim,
        }
    }

    pub fn param_count(&self) -> usize {
        match *self {
            Layer::Dense { input, output, .. } => output * input + output,
            Layer::LayerNorm { dim, .. } => 2 * dim,
            Layer::Relu { .. } => 0,
        }
    }
}

/// Builds arbitrary layer stacks; [`Mlp::init`] covers the usual shape.
#[derive(Clone, Debug)]
pub struct MlpBuilder {
    input: usize,
    current: usize,
    layers: Vec<Layer>,
    params: usize,
}

impl MlpBuilder {
    pub fn new(input: usize) -> Self {
        MlpBuilder {
            input,
            current: input,
            layers: Vec::new(),
            params: 0,
        }
    }

    fn push(mut self, layer: Layer) -> Self {
        self.current = layer.output_dim();
        self.params += layer.param_count();
        self.layers.push(layer);
        self
    }

    pub fn dense(self, output: usize) -> Self {
        let layer = Layer::Dense {
            input: self.current,
            output,
            offset: self.params,
        };
        self.push(layer)
    }

    pub fn layer_norm(self) -> Self {
        self.layer_norm_eps(LAYER_NORM_EPS)
    }

    pub fn layer_norm_eps(self, eps: f64) -> Self {
        let layer = Layer::LayerNorm {
            dim: self.current,
            eps,
            offset: self.params,
        };
        self.push(layer)
    }

    pub fn relu(self) -> Self {
        let layer = Layer::Relu { dim: self.current };
        self.push(layer)
    }

    /// Kaiming-style uniform weights in `±sqrt(6 / fan_in)`, zero biases, unit
    /// layer-norm gains. Weights are drawn layer by layer in declaration order.
    pub fn build(self, rng: &mut Rng) -> Result<Mlp> {
        if self.input == 0 || self.layers.is_empty() {
            return Err(Error::Config(
                "network needs a positive input width and at least one layer".into(),
            ));
        }
        let mut params = vec![0.0; self.params];
        for layer in &self.layers {
            match *layer {
                Layer::Dense {
                    input,
                    output,
                    offset,
                } => {
                    if input == 0 || output == 0 {
                        return Err(Error::Config("dense layer with zero width".into()));
                    }
                    let bound = (6.0 / input as f64).sqrt();
                    for w in &mut params[offset..offset + input * output] {
                        *w = rng.random_range(-bound..bound);
                    }
                }
                Layer::LayerNorm { dim, eps, offset } => {
                    if eps.is_nan() || eps <= 0.0 {
                        return Err(Error::Config(format!(
                            "layer norm eps must be positive, got {eps}"
                        )));
                    }
                    params[offset..offset + dim].fill(1.0);
                }
                Layer::Relu { .. } => {}
            }
        }
        Ok(Mlp {
            input: self.input,
            layers: self.layers,
            params,
            version: next_version(),
        })
    }
}

#[derive(Debug, PartialEq)]
pub struct Mlp {
    input: usize,
    layers: Vec<Layer>,
    params: Vec<f64>,
    version: u64,
}

impl Clone for Mlp {
    fn clone(&self) -> Self {
        Mlp {
            input: self.input,
            layers: self.layers.clone(),
            params: self.params.clone(),
            version: self.version,
        }
    }
}

#[derive(Debug)]
enum CacheEntry {
    Dense { input: Matrix },
    LayerNorm { xhat: Matrix, inv_std: Vec<f64> },
    Relu { output: Matrix },
}

/// Intermediate values from [`Mlp::forward`], consumed by [`Mlp::backward`].
#[derive(Debug)]
pub struct ForwardCache {
    version: u64,
    rows: usize,
    entries: Vec<CacheEntry>,
}

impl Mlp {
    /// `dims = [input, hidden.., output]`: every hidden dense layer is followed
    /// by layer norm and ReLU; the final dense layer is linear.
    pub fn init(dims: &[usize], rng: &mut Rng) -> Result<Self> {
        if dims.len() < 2 {
            return Err(Error::Config(format!("need at least 2 dims, got {dims:?}")));
        }
        let mut builder = MlpBuilder::new(dims[0]);
        for &hidden in &dims[1..dims.len() - 1] {
            builder = builder.dense(hidden).layer_norm().relu();
        }
        builder.dense(dims[dims.len() - 1]).build(rng)
    }

    pub fn from_seed(dims: &[usize], seed: u64) -> Result<Self> {
        Self::init(dims, &mut crate::rng::seeded(seed))
    }

    pub fn input_dim(&self) -> usize {
        self.input
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().map_or(self.input, Layer::output_dim)
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn param_count(&self) -> usize {
        self.params.len()
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    /// Mutable parameter access. Invalidates outstanding forward caches.
    pub fn params_mut(&mut self) -> &mut [f64] {
        self.version = next_version();
        &mut self.params
    }

    pub fn same_shape(&self, other: &Mlp) -> bool {
        self.input == other.input && self.layers == other.layers
    }

    fn check_input(&self, x: &Matrix) -> Result<()> {
        if x.cols != self.input {
            return Err(Error::shape(
                format!("{} input columns", self.input),
                format!("{} columns", x.cols),
            ));
        }
        Ok(())
    }

    pub fn forward(&self, x: &Matrix) -> Result<(Matrix, ForwardCache)> {
        self.check_input(x)?;
        let mut entries = Vec::with_capacity(self.layers.len());
        let out = self.run(x.clone(), Some(&mut entries));
        Ok((
            out,
            ForwardCache {
                version: self.version,
                rows: x.rows,
                entries,
            },
        ))
    }

    /// Forward pass without keeping anything for backpropagation.
    pub fn predict(&self, x: &Matrix) -> Result<Matrix> {
        self.check_input(x)?;
        Ok(self.run(x.clone(), None))
    }

    pub fn predict_one(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(self.predict(&Matrix::row_vector(x))?.into_vec())
    }

    fn run(&self, mut x: Matrix, mut cache: Option<&mut Vec<CacheEntry>>) -> Matrix {
        for layer in &self.layers {
            x = match *layer {
                Layer::Dense {
                    input,
                    output,
                    offset,
                } => {
                    let w = &self.params[offset..offset + input * output];
                    let b = &self.params[offset + input * output..offset + input * output + output];
                    let mut y = Matrix::zeros(x.rows, output);
                    // y = x * W^T
                    gemm(
                        x.rows,
                        input,
                        output,
                        &x.data,
                        (input, 1),
                        w,
                        (1, input),
                        &mut y.data,
                        false,
                    );
                    for row in y.data.chunks_exact_mut(output) {
                        for (v, bias) in row.iter_mut().zip(b) {
                            *v += bias;
                        }
                    }
                    if let Some(c) = cache.as_deref_mut() {
                        c.push(CacheEntry::Dense { input: x });
                    }
                    y
                }
                Layer::LayerNorm { dim, eps, offset } => {
                    let gain = &self.params[offset..offset + dim];
                    let bias = &self.params[offset + dim..offset + 2 * dim];
                    let mut inv_stds = Vec::with_capacity(x.rows);
                    let mut y = Matrix::zeros(x.rows, dim);
                    for (row, out) in x
                        .data
                        .chunks_exact_mut(dim)
                        .zip(y.data.chunks_exact_mut(dim))
                    {
                        let mean = row.iter().sum::<f64>() / dim as f64;
                        let var =
                            row.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / dim as f64;
                        let inv_std = 1.0 / (var + eps).sqrt();
                        for i in 0..dim {
                            let xhat = (row[i] - mean) * inv_std;
                            row[i] = xhat;
                            out[i] = gain[i] * xhat + bias[i];
                        }
                        inv_stds.push(inv_std);
                    }
                    if let Some(c) = cache.as_deref_mut() {
                        c.push(CacheEntry::LayerNorm {
                            xhat: x,
                            inv_std: inv_stds,
                        });
                    }
                    y
                }
                Layer::Relu { .. } => {
                    for v in &mut x.data {
                        // `max` also maps NaN to 0.
                        *v = v.max(0.0);
                    }
                    if let Some(c) = cache.as_deref_mut() {
                        c.push(CacheEntry::Relu { output: x.clone() });
                    }
                    x
                }
            };
        }
        x
    }

    /// Gradients of all parameters (flat layout) and of the input.
    pub fn backward(&self, cache: ForwardCache, d_out: &Matrix) -> Result<(Vec<f64>, Matrix)> {
        let (grads, d_in) = self.backprop(cache, d_out, true)?;
        Ok((grads, d_in.expect("input gradient requested")))
    }

    /// Like [`backward`](Self::backward) but skips the input gradient.
    pub fn backward_params(&self, cache: ForwardCache, d_out: &Matrix) -> Result<Vec<f64>> {
        Ok(self.backprop(cache, d_out, false)?.0)
    }

    fn backprop(
        &self,
        cache: ForwardCache,
        d_out: &Matrix,
        want_input_grad: bool,
    ) -> Result<(Vec<f64>, Option<Matrix>)> {
        if cache.version != self.version || cache.entries.len() != self.layers.len() {
            return Err(Error::Usage(
                "forward cache does not belong to this network's current parameters".into(),
            ));
        }
        if d_out.rows != cache.rows || d_out.cols != self.output_dim() {
            return Err(Error::shape(
                format!("{}x{} output gradient", cache.rows, self.output_dim()),
                format!("{}x{}", d_out.rows, d_out.cols),
            ));
        }
        let mut grads = vec![0.0; self.params.len()];
        let mut delta = d_out.clone();
        let n = delta.rows;
        let layer_count = self.layers.len();
        for (idx, (layer, entry)) in self.layers.iter().zip(cache.entries).enumerate().rev() {
            let need_delta = want_input_grad || idx > 0;
            match (layer, entry) {
                (
                    &Layer::Dense {
                        input,
                        output,
                        offset,
                    },
                    CacheEntry::Dense { input: x },
                ) => {
                    let (gw, rest) = grads[offset..offset + input * output + output]
                        .split_at_mut(input * output);
                    // dW = delta^T * x
                    gemm(
                        output,
                        n,
                        input,
                        &delta.data,
                        (1, output),
                        &x.data,
                        (input, 1),
                        gw,
                        false,
                    );
                    for row in delta.data.chunks_exact(output) {
                        for (g, d) in rest.iter_mut().zip(row) {
                            *g += d;
                        }
                    }
                    if need_delta {
                        let w = &self.params[offset..offset + input * output];
                        let mut dx = Matrix::zeros(n, input);
                        gemm(
                            n,
                            output,
                            input,
                            &delta.data,
                            (output, 1),
                            w,
                            (input, 1),
                            &mut dx.data,
                            false,
                        );
                        delta = dx;
                    }
                }
                (
                    &Layer::LayerNorm { dim, offset, .. },
                    CacheEntry::LayerNorm { xhat, inv_std },
                ) => {
                    let gain = &self.params[offset..offset + dim];
                    let (g_gain, g_bias) = grads[offset..offset + 2 * dim].split_at_mut(dim);
                    let inv_n = 1.0 / dim as f64;
                    for ((d_row, xh_row), &inv) in delta
                        .data
                        .chunks_exact_mut(dim)
                        .zip(xhat.data.chunks_exact(dim))
                        .zip(&inv_std)
                    {
                        let mut sum_dxhat = 0.0;
                        let mut sum_dxhat_xhat = 0.0;
                        for i in 0..dim {
                            g_gain[i] += d_row[i] * xh_row[i];
                            g_bias[i] += d_row[i];
                            let dxhat = d_row[i] * gain[i];
                            sum_dxhat += dxhat;
                            sum_dxhat_xhat += dxhat * xh_row[i];
                        }
                        for i in 0..dim {
                            let dxhat = d_row[i] * gain[i];
                            d_row[i] = inv
                                * (dxhat - inv_n * sum_dxhat - xh_row[i] * inv_n * sum_dxhat_xhat);
                        }
                    }
                }
                (Layer::Relu { .. }, CacheEntry::Relu { output }) => {
                    for (d, y) in delta.data.iter_mut().zip(&output.data) {
                        if *y <= 0.0 {
                            *d = 0.0;
                        }
                    }
                }
                _ => {
                    return Err(Error::Usage(format!(
                        "forward cache entry {idx} of {layer_count} does not match its layer"
                    )))
                }
            }
        }
        Ok((grads, want_input_grad.then_some(delta)))
    }

    /// Copies parameters from a network of identical shape.
    pub fn copy_from(&mut self, source: &Mlp) -> Result<()> {
        self.check_same_shape(source)?;
        self.params_mut().copy_from_slice(&source.params);
        Ok(())
    }

    /// Polyak averaging: `self <- tau * source + (1 - tau) * self`.
    pub fn soft_update_from(&mut self, source: &Mlp, tau: f64) -> Result<()> {
        self.check_same_shape(source)?;
        for (t, s) in self.params_mut().iter_mut().zip(&source.params) {
            *t = tau * s + (1.0 - tau) * *t;
        }
        Ok(())
    }

    fn check_same_shape(&self, other: &Mlp) -> Result<()> {
        if !self.same_shape(other) {
            return Err(Error::shape(
                format!("{:?}", self.layers),
                format!("{:?}", other.layers),
            ));
        }
        Ok(())
    }

    /// Checkpoint layout, all integers and floats little-endian:
    ///
    /// ```text
    /// magic       8 bytes  "DISRCNN\x01"
    /// input       u32
    /// layers      u32
    /// per layer   u8 tag, then
    ///               0 dense:      u32 input, u32 output
    ///               1 layer norm: u32 dim, f64 eps
    ///               2 relu:       u32 dim
    /// params      u64 count, then count x f64 in declaration order
    /// ```
    pub fn write_to<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        w.write_all(CHECKPOINT_MAGIC)?;
        w.write_all(&(self.input as u32).to_le_bytes())?;
        w.write_all(&(self.layers.len() as u32).to_le_bytes())?;
        for layer in &self.layers {
            match *layer {
                Layer::Dense { input, output, .. } => {
                    w.write_all(&[0])?;
                    w.write_all(&(input as u32).to_le_bytes())?;
                    w.write_all(&(output as u32).to_le_bytes())?;
                }
                Layer::LayerNorm { dim, eps, .. } => {
                    w.write_all(&[1])?;
                    w.write_all(&(dim as u32).to_le_bytes())?;
                    w.write_all(&eps.to_le_bytes())?;
                }
                Layer::Relu { dim } => {
                    w.write_all(&[2])?;
                    w.write_all(&(dim as u32).to_le_bytes())?;
                }
            }
        }
        w.write_all(&(self.params.len() as u64).to_le_bytes())?;
        for p in &self.params {
            w.write_all(&p.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_from<R: Read>(r: &mut R) -> Result<Self> {
        let bad = |msg: &str| Error::Usage(format!("malformed checkpoint: {msg}"));
        let io = |e: std::io::Error| bad(&e.to_string());
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic).map_err(io)?;
        if &magic != CHECKPOINT_MAGIC {
            return Err(bad("bad magic bytes"));
        }
        let mut u32_buf = [0u8; 4];
        let mut read_u32 = |r: &mut R| -> Result<usize> {
            r.read_exact(&mut u32_buf).map_err(io)?;
            Ok(u32::from_le_bytes(u32_buf) as usize)
        };
        let input = read_u32(r)?;
        let count = read_u32(r)?;
        let mut builder = MlpBuilder::new(input);
        for _ in 0..count {
            let mut tag = [0u8; 1];
            r.read_exact(&mut tag).map_err(io)?;
            builder = match tag[0] {
                0 => {
                    let i = read_u32(r)?;
                    let o = read_u32(r)?;
                    if i != builder.current {
                        return Err(bad("dense input does not match previous layer"));
                    }
                    builder.dense(o)
                }
                1 => {
                    let d = read_u32(r)?;
                    let mut eps = [0u8; 8];
                    r.read_exact(&mut eps).map_err(io)?;
                    if d != builder.current {
                        return Err(bad("layer norm width does not match previous layer"));
                    }
                    builder.layer_norm_eps(f64::from_le_bytes(eps))
                }
                2 => {
                    let d = read_u32(r)?;
                    if d != builder.current {
                        return Err(bad("relu width does not match previous layer"));
                    }
                    builder.relu()
                }
                t => return Err(bad(&format!("unknown layer tag {t}"))),
            };
        }
        let mut n = [0u8; 8];
        r.read_exact(&mut n).map_err(io)?;
        if u64::from_le_bytes(n) as usize != builder.params {
            return Err(bad("parameter count does not match layer shapes"));
        }
        let mut net = builder.build(&mut crate::rng::seeded(0))?;
        let mut buf = [0u8; 8];
        for p in net.params_mut() {
            r.read_exact(&mut buf).map_err(io)?;
            *p = f64::from_le_bytes(buf);
        }
        Ok(net)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = std::io::BufWriter::new(file);
        self.write_to(&mut w)
            .and_then(|_| w.flush())
            .map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_from(&mut std::io::BufReader::new(file))
    }
}

pub fn global_norm(grads: &[f64]) -> f64 {
    grads.iter().map(|g| g * g).sum::<f64>().sqrt()
}

/// Rescales `grads` in place so their global L2 norm is at most `max_norm`.
/// Returns the applied scale (1 when nothing changed).
pub fn clip_grad_norm(grads: &mut [f64], max_norm: f64) -> Result<f64> {
    if max_norm.is_nan() || max_norm <= 0.0 {
        return Err(Error::Config(format!(
            "max_norm must be positive, got {max_norm}"
        )));
    }
    let norm = global_norm(grads);
    if !norm.is_finite() {
        return Err(Error::Numeric(format!("gradient norm is {norm}")));
    }
    if norm <= max_norm {
        return Ok(1.0);
    }
    let scale = max_norm / norm;
    for g in grads.iter_mut() {
        *g *= scale;
    }
    Ok(scale)
}

/// Bias-corrected Adam over a flat parameter vector.
#[derive(Clone, Debug, PartialEq)]
pub struct AdamState {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    m: Vec<f64>,
    v: Vec<f64>,
    t: u64,
}

impl AdamState {
    pub fn new(param_count: usize, lr: f64) -> Self {
        AdamState {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            m: vec![0.0; param_count],
            v: vec![0.0; param_count],
            t: 0,
        }
    }

    pub fn for_net(net: &Mlp, lr: f64) -> Self {
        Self::new(net.param_count(), lr)
    }

    pub fn steps(&self) -> u64 {
        self.t
    }

    pub fn step(&mut self, params: &mut [f64], grads: &[f64]) -> Result<()> {
        if params.len() != self.m.len() || grads.len() != self.m.len() {
            return Err(Error::shape(
                format!("{} parameters and gradients", self.m.len()),
                format!("{} parameters, {} gradients", params.len(), grads.len()),
            ));
        }
        self.t += 1;
        let bc1 = 1.0 - self.beta1.powi(self.t as i32);
        let bc2 = 1.0 - self.beta2.powi(self.t as i32);
        for (((p, &g), m), v) in params
            .iter_mut()
            .zip(grads)
            .zip(&mut self.m)
            .zip(&mut self.v)
        {
            *m = self.beta1 * *m + (1.0 - self.beta1) * g;
            *v = self.beta2 * *v + (1.0 - self.beta2) * g * g;
            let m_hat = *m / bc1;
            let v_hat = *v / bc2;
            *p -= self.lr * m_hat / (v_hat.sqrt() + self.eps);
        }
        Ok(())
    }

    pub fn step_net(&mut self, net: &mut Mlp, grads: &[f64]) -> Result<()> {
        self.step(net.params_mut(), grads)
    }
}
