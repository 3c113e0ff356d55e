//! A plain feed-forward ReLU network: `f(x) = W_{m+1} ∘ ω_m ∘ … ∘ ω_1(x) + b_{m+1}`
//! with `ω_k(x) = relu(W_k x + b_k)`.
//!
//! Weight matrices are stored row-major with rows indexing outputs, so layer
//! `k` maps `ℓ_{k-1}` inputs to `ℓ_k` outputs by a left matrix action.

mod hexfloat;
mod io;

pub use hexfloat::{format_hex, parse_hex};
pub use io::{load_params, read_params, save_params, write_params, MODEL_MAGIC};

use crate::error::{Error, Result};
use crate::rng::SplitMix64;

/// Network shape plus the optimisation knobs that travel with it.
#[derive(Clone, Debug, PartialEq)]
pub struct NetSpec {
    /// `ℓ_0 … ℓ_{m+1}`: input width, hidden widths, output width.
    pub widths: Vec<usize>,
    pub epsilon: f64,
    pub beta: f64,
    pub batch_size: usize,
    pub seed: u64,
    /// Coefficient of the optional `λ·‖p‖²` penalty.
    pub l2: f64,
}

impl NetSpec {
    pub fn new(widths: Vec<usize>) -> Self {
        NetSpec { widths, epsilon: 0.001, beta: 10.0, batch_size: 10, seed: 0, l2: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.widths.len() < 2 {
            return Err(Error::Shape("need at least input and output widths".into()));
        }
        if self.widths.contains(&0) {
            return Err(Error::Shape(format!("zero width in {:?}", self.widths)));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidArgument(format!("learning rate must be positive, got {}", self.epsilon)));
        }
        if !(self.beta >= 1.0 && self.beta.is_finite()) {
            return Err(Error::InvalidArgument(format!("balance must be >= 1, got {}", self.beta)));
        }
        if self.batch_size == 0 {
            return Err(Error::InvalidArgument("batch size must be positive".into()));
        }
        if !(self.l2 >= 0.0 && self.l2.is_finite()) {
            return Err(Error::InvalidArgument(format!("l2 must be non-negative, got {}", self.l2)));
        }
        Ok(())
    }

    pub fn hidden_layers(&self) -> usize {
        self.widths.len() - 2
    }

    pub fn input_dim(&self) -> usize {
        self.widths[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.widths.last().unwrap()
    }
}

/// One affine map `x ↦ W x + b`.
#[derive(Clone, Debug, PartialEq)]
pub struct Layer {
    pub inputs: usize,
    pub outputs: usize,
    /// `outputs × inputs`, row-major.
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

impl Layer {
    pub fn zeros(inputs: usize, outputs: usize) -> Self {
        Layer { inputs, outputs, weights: vec![0.0; inputs * outputs], bias: vec![0.0; outputs] }
    }

    pub fn weight(&self, row: usize, col: usize) -> f64 {
        self.weights[row * self.inputs + col]
    }

    fn apply(&self, x: &[f64], out: &mut Vec<f64>) {
        out.clear();
        out.extend(
            self.weights
                .chunks_exact(self.inputs)
                .zip(&self.bias)
                .map(|(row, b)| row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + b),
        );
    }

    fn values(&self) -> impl Iterator<Item = &f64> {
        self.weights.iter().chain(&self.bias)
    }

    fn values_mut(&mut self) -> impl Iterator<Item = &mut f64> {
        self.weights.iter_mut().chain(self.bias.iter_mut())
    }
}

/// Weights and biases `(W_1, b_1, …, W_{m+1}, b_{m+1})`.
#[derive(Clone, Debug, PartialEq)]
pub struct Params {
    layers: Vec<Layer>,
}

/// Same shape as [`Params`]; one partial derivative per parameter.
#[derive(Clone, Debug, PartialEq)]
pub struct Gradient {
    layers: Vec<Layer>,
}

impl Params {
    pub fn from_layers(layers: Vec<Layer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::Shape("network has no layers".into()));
        }
        for (k, l) in layers.iter().enumerate() {
            if l.inputs == 0 || l.outputs == 0 {
                return Err(Error::Shape(format!("layer {} has a zero dimension", k + 1)));
            }
            if l.weights.len() != l.inputs * l.outputs || l.bias.len() != l.outputs {
                return Err(Error::Shape(format!("layer {} storage does not match {}x{}", k + 1, l.outputs, l.inputs)));
            }
        }
        if let Some(w) = layers.windows(2).find(|w| w[0].outputs != w[1].inputs) {
            return Err(Error::Shape(format!("layer widths {} and {} do not chain", w[0].outputs, w[1].inputs)));
        }
        Ok(Params { layers })
    }

    pub fn zeros(widths: &[usize]) -> Result<Self> {
        Params::from_layers(widths.windows(2).map(|w| Layer::zeros(w[0], w[1])).collect())
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [Layer] {
        &mut self.layers
    }

    pub fn widths(&self) -> Vec<usize> {
        let mut w = vec![self.layers[0].inputs];
        w.extend(self.layers.iter().map(|l| l.outputs));
        w
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].inputs
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().unwrap().outputs
    }

    /// All parameters in `W_1, b_1, W_2, b_2, …` order.
    pub fn flatten(&self) -> Vec<f64> {
        self.layers.iter().flat_map(Layer::values).copied().collect()
    }

    pub fn zero_gradient(&self) -> Gradient {
        Gradient { layers: self.layers.iter().map(|l| Layer::zeros(l.inputs, l.outputs)).collect() }
    }

    /// `p ← p - scale·g`.
    pub fn descend(&mut self, g: &Gradient, scale: f64) {
        for (p, g) in self.layers.iter_mut().zip(&g.layers) {
            for (pv, gv) in p.values_mut().zip(g.values()) {
                *pv -= scale * gv;
            }
        }
    }

    /// Network output without keeping intermediate values.
    pub fn logits(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_input(x)?;
        let mut cur = x.to_vec();
        let mut next = Vec::new();
        let last = self.layers.len() - 1;
        for (k, layer) in self.layers.iter().enumerate() {
            layer.apply(&cur, &mut next);
            if k < last {
                next.iter_mut().for_each(|v| *v = v.max(0.0));
            }
            std::mem::swap(&mut cur, &mut next);
        }
        Ok(cur)
    }

    fn check_input(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.input_dim() {
            return Err(Error::DimensionMismatch { expected: self.input_dim(), actual: x.len() });
        }
        Ok(())
    }
}

impl Gradient {
    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn flatten(&self) -> Vec<f64> {
        self.layers.iter().flat_map(Layer::values).copied().collect()
    }

    pub fn scale(&mut self, s: f64) {
        self.layers.iter_mut().flat_map(Layer::values_mut).for_each(|v| *v *= s);
    }

    pub fn add_assign(&mut self, other: &Gradient) {
        for (a, b) in self.layers.iter_mut().zip(&other.layers) {
            for (x, y) in a.values_mut().zip(b.values()) {
                *x += y;
            }
        }
    }

    pub fn clear(&mut self) {
        self.layers.iter_mut().flat_map(Layer::values_mut).for_each(|v| *v = 0.0);
    }

    fn same_shape(&self, p: &Params) -> bool {
        self.layers.len() == p.layers.len()
            && self.layers.iter().zip(&p.layers).all(|(a, b)| a.inputs == b.inputs && a.outputs == b.outputs)
    }
}

/// Uniform fan-balanced initialisation with zero biases.
///
/// Weights of layer `k` are `s·(2u - 1)` with `s = √(6/(ℓ_{k-1}+ℓ_k))` and `u`
/// the next [`SplitMix64::next_f64`] draw of the stream seeded with
/// `spec.seed`. Draws go layer by layer, row by row.
pub fn init_params(spec: &NetSpec) -> Result<Params> {
    spec.validate()?;
    let mut rng = SplitMix64::new(spec.seed);
    let layers = spec
        .widths
        .windows(2)
        .map(|w| {
            let (fan_in, fan_out) = (w[0], w[1]);
            let s = (6.0 / (fan_in + fan_out) as f64).sqrt();
            let weights = (0..fan_in * fan_out).map(|_| s * (2.0 * rng.next_f64() - 1.0)).collect();
            Layer { inputs: fan_in, outputs: fan_out, weights, bias: vec![0.0; fan_out] }
        })
        .collect();
    Params::from_layers(layers)
}

pub fn relu(x: &[f64]) -> Vec<f64> {
    x.iter().map(|&v| v.max(0.0)).collect()
}

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `log(1 + e^t)` without overflow.
fn softplus(t: f64) -> f64 {
    t.max(0.0) + (-t.abs()).exp().ln_1p()
}

/// Pre-activations and activations of every layer for one input.
#[derive(Clone, Debug)]
pub struct Forward {
    /// `activations[0]` is the input; `activations[k]` feeds layer `k+1`.
    pub activations: Vec<Vec<f64>>,
    /// `pre[k] = W_{k+1} activations[k] + b_{k+1}`; the last entry is the output.
    pub pre: Vec<Vec<f64>>,
}

impl Forward {
    pub fn logits(&self) -> &[f64] {
        self.pre.last().unwrap()
    }
}

pub fn forward(p: &Params, x: &[f64]) -> Result<Forward> {
    p.check_input(x)?;
    let n = p.layers.len();
    let mut activations = Vec::with_capacity(n);
    let mut pre = Vec::with_capacity(n);
    activations.push(x.to_vec());
    for (k, layer) in p.layers.iter().enumerate() {
        let mut z = Vec::with_capacity(layer.outputs);
        layer.apply(&activations[k], &mut z);
        if k + 1 < n {
            activations.push(relu(&z));
        }
        pre.push(z);
    }
    Ok(Forward { activations, pre })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Loss {
    /// `‖y - f(x)‖`.
    Euclid,
    /// Balanced binary cross entropy on logits.
    Bce { beta: f64 },
}

impl Loss {
    pub fn value(&self, logits: &[f64], target: &[f64]) -> f64 {
        match *self {
            Loss::Euclid => euclid(logits, target),
            Loss::Bce { beta } => loss_bce(logits, target, beta),
        }
    }

    /// `∂L/∂logits`.
    fn output_delta(&self, logits: &[f64], target: &[f64], out: &mut [f64]) {
        match *self {
            Loss::Euclid => {
                let dist = euclid(logits, target);
                for ((o, &f), &y) in out.iter_mut().zip(logits).zip(target) {
                    *o = if dist > 0.0 { (f - y) / dist } else { 0.0 };
                }
            }
            Loss::Bce { beta } => {
                for ((o, &t), &y) in out.iter_mut().zip(logits).zip(target) {
                    let s = sigmoid(t);
                    *o = (1.0 - y) * s - beta * y * (1.0 - s);
                }
            }
        }
    }
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

pub fn loss_euclid(p: &Params, x: &[f64], target: &[f64]) -> Result<f64> {
    let out = p.logits(x)?;
    if out.len() != target.len() {
        return Err(Error::DimensionMismatch { expected: out.len(), actual: target.len() });
    }
    Ok(euclid(&out, target))
}

/// `Σ (1-y)·(-log(1-σ(t))) + β·y·(-log σ(t))`, evaluated in logit space.
pub fn loss_bce(logits: &[f64], labels: &[f64], beta: f64) -> f64 {
    logits
        .iter()
        .zip(labels)
        .map(|(&t, &y)| {
            let neg = if y < 1.0 { (1.0 - y) * softplus(t) } else { 0.0 };
            let pos = if y > 0.0 { beta * y * softplus(-t) } else { 0.0 };
            neg + pos
        })
        .sum()
}

/// Adds the gradient of `loss` at `(x, target)` into `grad` and returns the
/// loss value. ReLU is given derivative 0 at 0.
pub fn accumulate_gradient(p: &Params, x: &[f64], target: &[f64], loss: Loss, grad: &mut Gradient) -> Result<f64> {
    if !grad.same_shape(p) {
        return Err(Error::Shape("gradient buffer does not match parameters".into()));
    }
    let fwd = forward(p, x)?;
    let logits = fwd.logits();
    if logits.len() != target.len() {
        return Err(Error::DimensionMismatch { expected: logits.len(), actual: target.len() });
    }
    let value = loss.value(logits, target);
    let mut delta = vec![0.0; logits.len()];
    loss.output_delta(logits, target, &mut delta);

    for k in (0..p.layers.len()).rev() {
        let layer = &p.layers[k];
        let g = &mut grad.layers[k];
        let input = &fwd.activations[k];
        for (r, &dr) in delta.iter().enumerate() {
            if dr == 0.0 {
                continue;
            }
            g.bias[r] += dr;
            let row = &mut g.weights[r * layer.inputs..(r + 1) * layer.inputs];
            for (gw, &a) in row.iter_mut().zip(input) {
                *gw += dr * a;
            }
        }
        if k > 0 {
            let below = &fwd.pre[k - 1];
            let mut next = vec![0.0; layer.inputs];
            for (r, &dr) in delta.iter().enumerate() {
                if dr == 0.0 {
                    continue;
                }
                let row = &layer.weights[r * layer.inputs..(r + 1) * layer.inputs];
                for (n, &w) in next.iter_mut().zip(row) {
                    *n += dr * w;
                }
            }
            for (n, &z) in next.iter_mut().zip(below) {
                if z <= 0.0 {
                    *n = 0.0;
                }
            }
            delta = next;
        }
    }
    Ok(value)
}

pub fn backward(p: &Params, x: &[f64], target: &[f64], loss: Loss) -> Result<Gradient> {
    let mut g = p.zero_gradient();
    accumulate_gradient(p, x, target, loss, &mut g)?;
    Ok(g)
}

/// Adds the gradient of `λ·‖p‖²`.
pub fn add_l2(grad: &mut Gradient, p: &Params, lambda: f64) {
    if lambda == 0.0 {
        return;
    }
    for (g, l) in grad.layers.iter_mut().zip(&p.layers) {
        for (gv, pv) in g.values_mut().zip(l.values()) {
            *gv += 2.0 * lambda * pv;
        }
    }
}

/// `p - ε·mean(gradients)`, summing in list order.
pub fn sgd_step(p: &Params, gradients: &[Gradient], epsilon: f64) -> Result<Params> {
    let (first, rest) =
        gradients.split_first().ok_or_else(|| Error::InvalidArgument("sgd step needs at least one gradient".into()))?;
    if gradients.iter().any(|g| !g.same_shape(p)) {
        return Err(Error::Shape("gradient does not match parameters".into()));
    }
    let mut sum = first.clone();
    for g in rest {
        sum.add_assign(g);
    }
    let mut next = p.clone();
    next.descend(&sum, epsilon / gradients.len() as f64);
    Ok(next)
}
