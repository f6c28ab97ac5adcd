//! Quantization-aware training on a small conv + fully-connected network.
//!
//! The forward pass uses quantized weights and activations while ADAM
//! updates full-precision shadow weights; gradients cross the quantizers
//! through clipped straight-through estimators. Three configurations are
//! compared: full-precision (ReLU), sign-binarized, and radix-X.
//!
//! Training is single-threaded and fully seeded: identical seeds give
//! bit-identical states and traces.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::conv::ImageU8;
use crate::error::{Error, Result};
use crate::quantizer::RadixConfig;
use crate::tensor::RealTensor;

/// How layer weights enter the forward product.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightMode {
    /// Shadow weights used directly.
    Real,
    /// Sign of each weight, +-1.
    Binarize,
    /// Radix levels times the per-layer bin width.
    Radix(RadixConfig),
}

/// Hidden-layer activation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActivationMode {
    Relu,
    Sign,
    RadixRelu,
}

/// Conv(filters, k x k) -> activation -> fully-connected -> softmax.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TinyNet {
    pub input_side: usize,
    pub conv_filters: usize,
    pub ksize: usize,
    pub classes: usize,
    pub weight_mode: WeightMode,
    pub activation: ActivationMode,
}

impl TinyNet {
    pub fn real(input_side: usize) -> Self {
        Self {
            input_side,
            conv_filters: 8,
            ksize: 3,
            classes: 10,
            weight_mode: WeightMode::Real,
            activation: ActivationMode::Relu,
        }
    }

    pub fn bnn(input_side: usize) -> Self {
        Self {
            weight_mode: WeightMode::Binarize,
            activation: ActivationMode::Sign,
            ..Self::real(input_side)
        }
    }

    pub fn radix(input_side: usize, cfg: RadixConfig) -> Self {
        Self {
            weight_mode: WeightMode::Radix(cfg),
            activation: ActivationMode::RadixRelu,
            ..Self::real(input_side)
        }
    }

    pub fn mode_token(&self) -> &'static str {
        match self.weight_mode {
            WeightMode::Real => "real",
            WeightMode::Binarize => "bnn",
            WeightMode::Radix(_) => "radix",
        }
    }

    pub fn conv_out(&self) -> usize {
        self.input_side - self.ksize + 1
    }

    pub fn feature_len(&self) -> usize {
        self.conv_filters * self.conv_out() * self.conv_out()
    }

    fn layer_shapes(&self) -> [Vec<usize>; 2] {
        [
            vec![self.conv_filters, self.ksize, self.ksize],
            vec![self.classes, self.feature_len()],
        ]
    }
}

/// ADAM hyperparameters with the usual defaults.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdamHyper {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamHyper {
    fn default() -> Self {
        Self {
            lr: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

/// Shadow weights and ADAM moments for one layer.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerTensors {
    pub w: Vec<f64>,
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub shape: Vec<usize>,
}

/// Full optimizer state.
#[derive(Debug, Clone, PartialEq)]
pub struct QatState {
    pub layers: Vec<LayerTensors>,
    pub step: u64,
    pub hyper: AdamHyper,
}

impl QatState {
    /// Gaussian initialization scaled by 1/sqrt(fan_in), seeded.
    pub fn init(net: &TinyNet, seed: u64, hyper: AdamHyper) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let layers = net
            .layer_shapes()
            .into_iter()
            .map(|shape| {
                let len: usize = shape.iter().product();
                let fan_in: usize = shape[1..].iter().product();
                let scale = 1.0 / (fan_in as f64).sqrt();
                let w = (0..len)
                    .map(|_| {
                        let z: f64 = StandardNormal.sample(&mut rng);
                        z * scale
                    })
                    .collect();
                LayerTensors {
                    w,
                    m: vec![0.0; len],
                    v: vec![0.0; len],
                    shape,
                }
            })
            .collect();
        Self {
            layers,
            step: 0,
            hyper,
        }
    }
}

/// Effective weights for the forward product plus the straight-through
/// factor `d w_eff / d w_real` used on the way back.
fn effective_weights(mode: WeightMode, w: &[f64]) -> (Vec<f64>, Vec<f64>) {
    match mode {
        WeightMode::Real => (w.to_vec(), vec![1.0; w.len()]),
        WeightMode::Binarize => {
            let eff = w.iter().map(|&v| if v >= 0.0 { 1.0 } else { -1.0 }).collect();
            let chain = w
                .iter()
                .map(|&v| if v.abs() <= 1.0 { 1.0 } else { 0.0 })
                .collect();
            (eff, chain)
        }
        WeightMode::Radix(cfg) => {
            let lo = w.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = w.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let range = hi - lo;
            if range == 0.0 {
                // Degenerate tensor: treat as the zero level but keep the
                // gradient path open so training can move off it.
                return (vec![0.0; w.len()], vec![1.0; w.len()]);
            }
            let (eff, chain): (Vec<f64>, Vec<f64>) = w
                .iter()
                .map(|&v| {
                    let q = radix_level(v, lo, range, &cfg);
                    let s_w = range / cfg.x() as f64;
                    (q as f64 * s_w, ste_factor(v, lo, hi, s_w))
                })
                .unzip();
            (eff, chain)
        }
    }
}

fn radix_level(v: f64, lo: f64, range: f64, cfg: &RadixConfig) -> i32 {
    let x = cfg.x() as f64;
    let k = ((v - lo) * x / range).floor() as i32;
    k.min(cfg.x() as i32 - 1).max(0) - (cfg.x() as i32 - 1) / 2
}

/// Clipped straight-through factor for the radix weight quantizer: the
/// bin width inside the calibration range, zero outside it.
pub fn ste_factor(w: f64, calib_min: f64, calib_max: f64, bin_width: f64) -> f64 {
    if w >= calib_min && w <= calib_max {
        bin_width
    } else {
        0.0
    }
}

/// Everything the backward pass needs from one forward pass.
#[derive(Debug, Clone)]
pub struct Cache {
    step: u64,
    b: usize,
    a_in: Vec<f64>,
    /// Conv pre-activations, `b x filters x out x out`.
    pub conv_pre: Vec<f64>,
    act: Vec<f64>,
    act_mask: Vec<f64>,
    /// Per-batch calibration max of the hidden pre-activations.
    pub pre_act_max: f64,
    w_eff: [Vec<f64>; 2],
    w_chain: [Vec<f64>; 2],
}

/// A contiguous batch of inputs scaled to `[0, 1]`.
pub struct Batch<'a> {
    pub x: &'a [f64],
    pub b: usize,
}

/// Forward pass; returns logits (`b x classes`) and the backward cache.
pub fn forward(net: &TinyNet, state: &QatState, batch: &Batch) -> Result<(Vec<f64>, Cache)> {
    let in_dim = net.input_side * net.input_side;
    if batch.x.len() != batch.b * in_dim {
        return Err(Error::ShapeMismatch(format!(
            "batch of {} x {in_dim} wants {} values, got {}",
            batch.b,
            batch.b * in_dim,
            batch.x.len()
        )));
    }
    let (w_eff1, chain1) = effective_weights(net.weight_mode, &state.layers[0].w);
    let (w_eff2, chain2) = effective_weights(net.weight_mode, &state.layers[1].w);

    // Input mapping: radix nets see quantized levels scaled back to [0,1].
    let a_in: Vec<f64> = match net.weight_mode {
        WeightMode::Radix(cfg) => {
            let a_max = cfg.a_max() as f64;
            batch.x.iter().map(|&v| (v * a_max).round() / a_max).collect()
        }
        _ => batch.x.to_vec(),
    };

    let side = net.input_side;
    let k = net.ksize;
    let out = net.conv_out();
    let feat = net.feature_len();
    let mut conv_pre = vec![0.0; batch.b * feat];
    for b in 0..batch.b {
        let img = &a_in[b * in_dim..(b + 1) * in_dim];
        for f in 0..net.conv_filters {
            let wf = &w_eff1[f * k * k..(f + 1) * k * k];
            for oy in 0..out {
                for ox in 0..out {
                    let mut acc = 0.0;
                    for ky in 0..k {
                        let row = &img[(oy + ky) * side + ox..(oy + ky) * side + ox + k];
                        let wrow = &wf[ky * k..ky * k + k];
                        for kx in 0..k {
                            acc += wrow[kx] * row[kx];
                        }
                    }
                    conv_pre[b * feat + f * out * out + oy * out + ox] = acc;
                }
            }
        }
    }

    let (act, act_mask, pre_act_max) = apply_activation(net, &conv_pre);

    let mut logits = vec![0.0; batch.b * net.classes];
    for b in 0..batch.b {
        let a = &act[b * feat..(b + 1) * feat];
        for c in 0..net.classes {
            let wc = &w_eff2[c * feat..(c + 1) * feat];
            let mut acc = 0.0;
            for j in 0..feat {
                acc += wc[j] * a[j];
            }
            logits[b * net.classes + c] = acc;
        }
    }

    let cache = Cache {
        step: state.step,
        b: batch.b,
        a_in,
        conv_pre,
        act,
        act_mask,
        pre_act_max,
        w_eff: [w_eff1, w_eff2],
        w_chain: [chain1, chain2],
    };
    Ok((logits, cache))
}

fn apply_activation(net: &TinyNet, pre: &[f64]) -> (Vec<f64>, Vec<f64>, f64) {
    match net.activation {
        ActivationMode::Relu => {
            let act = pre.iter().map(|&y| y.max(0.0)).collect();
            let mask = pre.iter().map(|&y| if y > 0.0 { 1.0 } else { 0.0 }).collect();
            (act, mask, 0.0)
        }
        ActivationMode::Sign => {
            let act = pre.iter().map(|&y| if y >= 0.0 { 1.0 } else { -1.0 }).collect();
            // Hard-tanh window straight-through.
            let mask = pre
                .iter()
                .map(|&y| if y.abs() <= 1.0 { 1.0 } else { 0.0 })
                .collect();
            (act, mask, 0.0)
        }
        ActivationMode::RadixRelu => {
            let cfg = match net.weight_mode {
                WeightMode::Radix(cfg) => cfg,
                _ => RadixConfig::radix5(),
            };
            let a_max = cfg.a_max();
            let y_max = pre.iter().cloned().fold(0.0f64, f64::max);
            if y_max <= 0.0 {
                return (vec![0.0; pre.len()], vec![0.0; pre.len()], 0.0);
            }
            let mut act = Vec::with_capacity(pre.len());
            let mut mask = Vec::with_capacity(pre.len());
            for &y in pre {
                if y <= 0.0 {
                    act.push(0.0);
                    mask.push(0.0);
                } else {
                    let level = ((y * a_max as f64 / y_max).floor() as i32 + 1).min(a_max);
                    act.push(level as f64 * y_max / a_max as f64);
                    // Linear region is the open interval (0, y_max).
                    mask.push(if y < y_max { 1.0 } else { 0.0 });
                }
            }
            (act, mask, y_max)
        }
    }
}

/// Mean softmax cross-entropy, its gradient w.r.t. the logits, and the
/// number of correct argmax predictions.
pub fn loss_and_grad(logits: &[f64], labels: &[u8], classes: usize) -> (f64, Vec<f64>, usize) {
    let b = labels.len();
    let mut grad = vec![0.0; logits.len()];
    let mut loss = 0.0;
    let mut correct = 0;
    for i in 0..b {
        let row = &logits[i * classes..(i + 1) * classes];
        let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let exps: Vec<f64> = row.iter().map(|&z| (z - max).exp()).collect();
        let sum: f64 = exps.iter().sum();
        let label = labels[i] as usize;
        loss += -(exps[label] / sum).ln();
        let argmax = row
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .map(|(idx, _)| idx)
            .unwrap();
        if argmax == label {
            correct += 1;
        }
        for c in 0..classes {
            let p = exps[c] / sum;
            grad[i * classes + c] = (p - if c == label { 1.0 } else { 0.0 }) / b as f64;
        }
    }
    (loss / b as f64, grad, correct)
}

/// Backpropagate `d loss / d logits` onto the shadow weights through the
/// straight-through estimators. The cache must come from a forward pass at
/// the current optimizer step.
pub fn backward_ste(
    net: &TinyNet,
    state: &QatState,
    cache: &Cache,
    dlogits: &[f64],
) -> Result<Vec<Vec<f64>>> {
    if cache.step != state.step {
        return Err(Error::StaleCache {
            cache_step: cache.step,
            state_step: state.step,
        });
    }
    let feat = net.feature_len();
    let classes = net.classes;
    let in_dim = net.input_side * net.input_side;
    let side = net.input_side;
    let k = net.ksize;
    let out = net.conv_out();
    let b_n = cache.b;

    // Fully-connected layer.
    let mut g_fc = vec![0.0; classes * feat];
    let mut d_act = vec![0.0; b_n * feat];
    for b in 0..b_n {
        let a = &cache.act[b * feat..(b + 1) * feat];
        let dl = &dlogits[b * classes..(b + 1) * classes];
        for c in 0..classes {
            let d = dl[c];
            if d == 0.0 {
                continue;
            }
            let wc = &cache.w_eff[1][c * feat..(c + 1) * feat];
            for j in 0..feat {
                g_fc[c * feat + j] += d * a[j];
                d_act[b * feat + j] += d * wc[j];
            }
        }
    }
    for (g, chain) in g_fc.iter_mut().zip(&cache.w_chain[1]) {
        *g *= chain;
    }

    // Through the activation straight-through mask.
    let d_pre: Vec<f64> = d_act
        .iter()
        .zip(&cache.act_mask)
        .map(|(d, m)| d * m)
        .collect();

    // Conv layer.
    let mut g_conv = vec![0.0; net.conv_filters * k * k];
    for b in 0..b_n {
        let img = &cache.a_in[b * in_dim..(b + 1) * in_dim];
        for f in 0..net.conv_filters {
            for oy in 0..out {
                for ox in 0..out {
                    let d = d_pre[b * feat + f * out * out + oy * out + ox];
                    if d == 0.0 {
                        continue;
                    }
                    for ky in 0..k {
                        for kx in 0..k {
                            g_conv[f * k * k + ky * k + kx] +=
                                d * img[(oy + ky) * side + (ox + kx)];
                        }
                    }
                }
            }
        }
    }
    for (g, chain) in g_conv.iter_mut().zip(&cache.w_chain[0]) {
        *g *= chain;
    }

    Ok(vec![g_conv, g_fc])
}

/// One bias-corrected ADAM update over all layers.
pub fn adam_step(state: &mut QatState, grads: &[Vec<f64>]) -> Result<()> {
    if grads.len() != state.layers.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} gradient tensors for {} layers",
            grads.len(),
            state.layers.len()
        )));
    }
    state.step += 1;
    let h = state.hyper;
    let t = state.step as i32;
    let bias1 = 1.0 - h.beta1.powi(t);
    let bias2 = 1.0 - h.beta2.powi(t);
    for (layer, g) in state.layers.iter_mut().zip(grads) {
        if g.len() != layer.w.len() {
            return Err(Error::ShapeMismatch(format!(
                "gradient of {} values for layer of {}",
                g.len(),
                layer.w.len()
            )));
        }
        for (i, &g_i) in g.iter().enumerate() {
            layer.m[i] = h.beta1 * layer.m[i] + (1.0 - h.beta1) * g_i;
            layer.v[i] = h.beta2 * layer.v[i] + (1.0 - h.beta2) * g_i * g_i;
            let m_hat = layer.m[i] / bias1;
            let v_hat = layer.v[i] / bias2;
            layer.w[i] -= h.lr * m_hat / (v_hat.sqrt() + h.eps);
        }
    }
    Ok(())
}

/// Labeled inputs scaled to `[0, 1]`.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub x: Vec<f64>,
    pub labels: Vec<u8>,
    pub n: usize,
    pub in_dim: usize,
}

impl Dataset {
    pub fn from_images(images: &[ImageU8], labels: &[u8]) -> Result<Self> {
        if images.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if images.len() != labels.len() {
            return Err(Error::DimensionMismatch {
                expected: images.len(),
                got: labels.len(),
            });
        }
        let in_dim = images[0].h() * images[0].w();
        let mut x = Vec::with_capacity(images.len() * in_dim);
        for img in images {
            if img.h() * img.w() != in_dim {
                return Err(Error::ShapeMismatch("ragged image stack".into()));
            }
            x.extend(img.pixels().iter().map(|&p| p as f64 / 255.0));
        }
        Ok(Self {
            x,
            labels: labels.to_vec(),
            n: images.len(),
            in_dim,
        })
    }

    /// Head/tail split at `n_train` samples.
    pub fn split_at(&self, n_train: usize) -> (Dataset, Dataset) {
        let n_train = n_train.min(self.n);
        let head = Dataset {
            x: self.x[..n_train * self.in_dim].to_vec(),
            labels: self.labels[..n_train].to_vec(),
            n: n_train,
            in_dim: self.in_dim,
        };
        let tail = Dataset {
            x: self.x[n_train * self.in_dim..].to_vec(),
            labels: self.labels[n_train..].to_vec(),
            n: self.n - n_train,
            in_dim: self.in_dim,
        };
        (head, tail)
    }
}

/// Training-loop knobs.
#[derive(Debug, Clone, Copy)]
pub struct TrainOptions {
    pub batch_size: usize,
    pub hyper: AdamHyper,
    /// Overwrite the shadow weights with their quantized values after each
    /// step. This drops the full-precision state the loop depends on and
    /// exists to show why the shadow copy must be kept.
    pub discard_shadow: bool,
}

impl Default for TrainOptions {
    fn default() -> Self {
        Self {
            batch_size: 32,
            hyper: AdamHyper::default(),
            discard_shadow: false,
        }
    }
}

/// Accuracy trace entry; epoch 0 is the evaluation of the initial state.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochStats {
    pub epoch: usize,
    pub train_acc: f64,
    pub val_acc: f64,
    pub train_loss: f64,
}

/// Final state plus the per-epoch accuracy trace.
#[derive(Debug, Clone)]
pub struct TrainRun {
    pub state: QatState,
    pub trace: Vec<EpochStats>,
}

/// Mean loss and accuracy over a dataset without touching the state.
pub fn evaluate(net: &TinyNet, state: &QatState, data: &Dataset, batch_size: usize) -> Result<(f64, f64)> {
    if data.n == 0 {
        return Err(Error::EmptyDataset);
    }
    let mut correct = 0usize;
    let mut loss_sum = 0.0;
    let mut done = 0usize;
    while done < data.n {
        let b = batch_size.min(data.n - done);
        let batch = Batch {
            x: &data.x[done * data.in_dim..(done + b) * data.in_dim],
            b,
        };
        let (logits, _) = forward(net, state, &batch)?;
        let (loss, _, c) = loss_and_grad(&logits, &data.labels[done..done + b], net.classes);
        correct += c;
        loss_sum += loss * b as f64;
        done += b;
    }
    Ok((loss_sum / data.n as f64, correct as f64 / data.n as f64))
}

/// Run the training loop for `epochs` epochs, deterministically in `seed`.
pub fn train(
    net: &TinyNet,
    train_set: &Dataset,
    val_set: &Dataset,
    epochs: usize,
    seed: u64,
    opts: TrainOptions,
) -> Result<TrainRun> {
    if train_set.n == 0 || val_set.n == 0 {
        return Err(Error::EmptyDataset);
    }
    if train_set.in_dim != net.input_side * net.input_side {
        return Err(Error::ShapeMismatch(format!(
            "dataset of {} inputs for a {}x{} net",
            train_set.in_dim, net.input_side, net.input_side
        )));
    }
    let mut state = QatState::init(net, seed, opts.hyper);
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
    let mut trace = Vec::with_capacity(epochs + 1);

    let (train_loss, train_acc) = evaluate(net, &state, train_set, opts.batch_size)?;
    let (_, val_acc) = evaluate(net, &state, val_set, opts.batch_size)?;
    trace.push(EpochStats {
        epoch: 0,
        train_acc,
        val_acc,
        train_loss,
    });

    let mut order: Vec<usize> = (0..train_set.n).collect();
    let mut batch_x = Vec::new();
    let mut batch_labels = Vec::new();
    for epoch in 1..=epochs {
        for i in (1..order.len()).rev() {
            let j = rng.gen_range(0..=i);
            order.swap(i, j);
        }
        let mut epoch_loss = 0.0;
        let mut batches = 0usize;
        for chunk in order.chunks(opts.batch_size) {
            batch_x.clear();
            batch_labels.clear();
            for &idx in chunk {
                batch_x
                    .extend_from_slice(&train_set.x[idx * train_set.in_dim..(idx + 1) * train_set.in_dim]);
                batch_labels.push(train_set.labels[idx]);
            }
            let batch = Batch {
                x: &batch_x,
                b: chunk.len(),
            };
            let (logits, cache) = forward(net, &state, &batch)?;
            let (loss, dlogits, _) = loss_and_grad(&logits, &batch_labels, net.classes);
            let grads = backward_ste(net, &state, &cache, &dlogits)?;
            adam_step(&mut state, &grads)?;
            if opts.discard_shadow {
                for layer in &mut state.layers {
                    let (eff, _) = effective_weights(net.weight_mode, &layer.w);
                    layer.w = eff;
                }
            }
            epoch_loss += loss;
            batches += 1;
        }
        let (_, train_acc) = evaluate(net, &state, train_set, opts.batch_size)?;
        let (_, val_acc) = evaluate(net, &state, val_set, opts.batch_size)?;
        trace.push(EpochStats {
            epoch,
            train_acc,
            val_acc,
            train_loss: epoch_loss / batches.max(1) as f64,
        });
    }
    Ok(TrainRun { state, trace })
}

/// Accuracy trace in CSV form.
pub fn trace_to_csv(mode: &str, trace: &[EpochStats]) -> String {
    let mut out = String::from("epoch,mode,train_acc,val_acc\n");
    for row in trace {
        out.push_str(&format!(
            "{},{},{},{}\n",
            row.epoch, mode, row.train_acc, row.val_acc
        ));
    }
    out
}

const CHECKPOINT_MAGIC: &[u8; 4] = b"QAT1";

/// Save optimizer state: magic, layer count, per-layer RXT tensors for
/// the weights and both moments, then step and hyperparameters.
pub fn save_checkpoint<P: AsRef<Path>>(path: P, state: &QatState) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(CHECKPOINT_MAGIC)?;
    w.write_all(&(state.layers.len() as u32).to_le_bytes())?;
    for layer in &state.layers {
        for t in [&layer.w, &layer.m, &layer.v] {
            let tensor = RealTensor::new(t.clone(), layer.shape.clone())?;
            crate::io::rxt::write_f64(&mut w, &tensor)?;
        }
    }
    w.write_all(&(state.step as u32).to_le_bytes())?;
    for field in [
        state.hyper.lr,
        state.hyper.beta1,
        state.hyper.beta2,
        state.hyper.eps,
    ] {
        w.write_all(&field.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn load_checkpoint<P: AsRef<Path>>(path: P) -> Result<QatState> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != CHECKPOINT_MAGIC {
        return Err(Error::Format("not a QAT1 checkpoint".into()));
    }
    let mut u32buf = [0u8; 4];
    r.read_exact(&mut u32buf)?;
    let n_layers = u32::from_le_bytes(u32buf) as usize;
    let mut layers = Vec::with_capacity(n_layers);
    for _ in 0..n_layers {
        let mut tensors = Vec::with_capacity(3);
        let mut shape = Vec::new();
        for _ in 0..3 {
            match crate::io::rxt::read(&mut r)? {
                crate::io::rxt::RxtData::F64(t) => {
                    shape = t.shape().to_vec();
                    tensors.push(t.values().to_vec());
                }
                _ => return Err(Error::Format("checkpoint tensor must be f64".into())),
            }
        }
        let v = tensors.pop().unwrap();
        let m = tensors.pop().unwrap();
        let w = tensors.pop().unwrap();
        layers.push(LayerTensors { w, m, v, shape });
    }
    r.read_exact(&mut u32buf)?;
    let step = u32::from_le_bytes(u32buf) as u64;
    let mut f64buf = [0u8; 8];
    let mut fields = [0.0f64; 4];
    for field in fields.iter_mut() {
        r.read_exact(&mut f64buf)?;
        *field = f64::from_le_bytes(f64buf);
    }
    Ok(QatState {
        layers,
        step,
        hyper: AdamHyper {
            lr: fields[0],
            beta1: fields[1],
            beta2: fields[2],
            eps: fields[3],
        },
    })
}
