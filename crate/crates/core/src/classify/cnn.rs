use std::ops::Range;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::seeded;
use crate::scalar::Real;

/// Samples per gradient chunk. Chunks are reduced in index order, so results
/// do not depend on the number of worker threads.
const GRAD_CHUNK: usize = 8;

/// Three conv3×3 / ReLU / maxpool2 stages, a hidden dense ReLU layer and a
/// softmax output. Convolutions use zero "same" padding.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CnnArch {
    pub height: usize,
    pub width: usize,
    pub channels: [usize; 3],
    pub hidden: usize,
    pub n_classes: usize,
}

impl CnnArch {
    pub fn compact(height: usize, width: usize, n_classes: usize) -> Self {
        Self {
            height,
            width,
            channels: [8, 16, 32],
            hidden: 128,
            n_classes,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.height == 0 || self.width == 0 || !self.height.is_multiple_of(8) || !self.width.is_multiple_of(8) {
            return Err(Error::invalid(format!(
                "input {}x{} must be a positive multiple of 8 on both sides",
                self.height, self.width
            )));
        }
        if self.channels.contains(&0) || self.hidden == 0 {
            return Err(Error::invalid("layer widths must be positive"));
        }
        if self.n_classes < 2 {
            return Err(Error::invalid("at least two classes are required"));
        }
        Ok(())
    }

    pub fn input_len(&self) -> usize {
        self.height * self.width
    }

    /// (in channels, out channels, height, width) of conv stage `i`.
    fn stage(&self, i: usize) -> (usize, usize, usize, usize) {
        let cin = if i == 0 { 1 } else { self.channels[i - 1] };
        (cin, self.channels[i], self.height >> i, self.width >> i)
    }

    fn flat_len(&self) -> usize {
        self.channels[2] * (self.height / 8) * (self.width / 8)
    }

    pub fn layout(&self) -> Layout {
        let mut at = 0;
        let mut take = |n: usize| {
            let r = at..at + n;
            at += n;
            r
        };
        let mut conv_w: [Range<usize>; 3] = Default::default();
        let mut conv_b: [Range<usize>; 3] = Default::default();
        for i in 0..3 {
            let (cin, cout, _, _) = self.stage(i);
            conv_w[i] = take(cout * cin * 9);
            conv_b[i] = take(cout);
        }
        let fc1_w = take(self.hidden * self.flat_len());
        let fc1_b = take(self.hidden);
        let fc2_w = take(self.n_classes * self.hidden);
        let fc2_b = take(self.n_classes);
        Layout {
            conv_w,
            conv_b,
            fc1_w,
            fc1_b,
            fc2_w,
            fc2_b,
            total: at,
        }
    }

    /// Fan-in of every weight tensor, in layout order (biases excluded).
    fn fan_ins(&self) -> [usize; 5] {
        [
            9,
            self.channels[0] * 9,
            self.channels[1] * 9,
            self.flat_len(),
            self.hidden,
        ]
    }
}

/// Offsets of every tensor inside the flat parameter vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    /// `[out][in][3][3]`
    pub conv_w: [Range<usize>; 3],
    pub conv_b: [Range<usize>; 3],
    /// `[hidden][flat]`
    pub fc1_w: Range<usize>,
    pub fc1_b: Range<usize>,
    /// `[classes][hidden]`
    pub fc2_w: Range<usize>,
    pub fc2_b: Range<usize>,
    pub total: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cnn<T> {
    arch: CnnArch,
    layout: Layout,
    params: Vec<T>,
}

/// Intermediate values kept for backpropagation.
struct Trace<T> {
    /// Zero-padded input to each conv stage, `cin × (h+2) × (w+2)`.
    padded: [Vec<T>; 3],
    /// Post-ReLU conv outputs, `cout × h × w`.
    act: [Vec<T>; 3],
    /// Index into `act[i]` chosen by each pooled output.
    pool_idx: [Vec<u32>; 3],
    flat: Vec<T>,
    hidden: Vec<T>,
    probs: Vec<T>,
}

impl<T: Real> Cnn<T> {
    /// He-uniform weights (bound `sqrt(6 / fan_in)`), zero biases.
    pub fn new(arch: CnnArch, seed: u64) -> Result<Self> {
        let mut cnn = Self::zeros(arch)?;
        let mut rng = seeded(seed);
        let l = cnn.layout.clone();
        let ranges = [
            l.conv_w[0].clone(),
            l.conv_w[1].clone(),
            l.conv_w[2].clone(),
            l.fc1_w.clone(),
            l.fc2_w.clone(),
        ];
        for (range, fan_in) in ranges.into_iter().zip(cnn.arch.fan_ins()) {
            let bound = (6.0 / fan_in as f64).sqrt();
            for p in &mut cnn.params[range] {
                *p = T::lit(rng.random_range(-bound..bound));
            }
        }
        Ok(cnn)
    }

    pub fn zeros(arch: CnnArch) -> Result<Self> {
        arch.validate()?;
        let layout = arch.layout();
        Ok(Self {
            params: vec![T::zero(); layout.total],
            layout,
            arch,
        })
    }

    pub fn from_params(arch: CnnArch, params: Vec<T>) -> Result<Self> {
        arch.validate()?;
        let layout = arch.layout();
        if params.len() != layout.total {
            return Err(Error::Shape {
                expected: format!("{} parameters", layout.total),
                got: format!("{}", params.len()),
            });
        }
        Ok(Self { arch, layout, params })
    }

    pub fn arch(&self) -> &CnnArch {
        &self.arch
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn params(&self) -> &[T] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [T] {
        &mut self.params
    }

    fn check_batch(&self, inputs: &[T]) -> Result<usize> {
        let d = self.arch.input_len();
        if !inputs.len().is_multiple_of(d) {
            return Err(Error::Shape {
                expected: format!("a multiple of {d} values"),
                got: format!("{}", inputs.len()),
            });
        }
        Ok(inputs.len() / d)
    }

    /// Softmax output for one image.
    pub fn forward_one(&self, image: &[T]) -> Result<Vec<T>> {
        if image.len() != self.arch.input_len() {
            return Err(Error::Shape {
                expected: format!("{} values", self.arch.input_len()),
                got: format!("{}", image.len()),
            });
        }
        Ok(self.trace(image).probs)
    }

    /// Softmax outputs for a row-major batch, `batch × n_classes`.
    pub fn forward(&self, inputs: &[T]) -> Result<Vec<T>> {
        let n = self.check_batch(inputs)?;
        let d = self.arch.input_len();
        let rows: Vec<Vec<T>> = (0..n)
            .into_par_iter()
            .map(|i| self.trace(&inputs[i * d..(i + 1) * d]).probs)
            .collect();
        Ok(rows.concat())
    }

    pub fn predict(&self, image: &[T]) -> Result<usize> {
        Ok(argmax(&self.forward_one(image)?))
    }

    /// Mean cross-entropy and its exact gradient with respect to every parameter.
    pub fn gradients(&self, inputs: &[T], labels: &[usize]) -> Result<(T, Vec<T>)> {
        let (loss, _, grad) = self.loss_and_gradients(inputs, labels)?;
        Ok((loss, grad))
    }

    /// Mean loss, correct-prediction count and mean gradient.
    pub(crate) fn loss_and_gradients(&self, inputs: &[T], labels: &[usize]) -> Result<(T, usize, Vec<T>)> {
        let n = self.check_batch(inputs)?;
        if n == 0 {
            return Err(Error::Empty("batch"));
        }
        if labels.len() != n {
            return Err(Error::LengthMismatch {
                left: n,
                right: labels.len(),
            });
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= self.arch.n_classes) {
            return Err(Error::invalid(format!("label {bad} out of range")));
        }
        let d = self.arch.input_len();
        let partials: Vec<(T, usize, Vec<T>)> = (0..n)
            .collect::<Vec<_>>()
            .par_chunks(GRAD_CHUNK)
            .map(|chunk| {
                let mut grad = vec![T::zero(); self.layout.total];
                let mut loss = T::zero();
                let mut correct = 0;
                for &i in chunk {
                    let trace = self.trace(&inputs[i * d..(i + 1) * d]);
                    let y = labels[i];
                    loss = loss - trace.probs[y].max(T::min_positive_value()).ln();
                    if argmax(&trace.probs) == y {
                        correct += 1;
                    }
                    self.backward(&trace, y, &mut grad);
                }
                (loss, correct, grad)
            })
            .collect();
        let mut total = vec![T::zero(); self.layout.total];
        let mut loss = T::zero();
        let mut correct = 0;
        for (l, c, g) in partials {
            loss = loss + l;
            correct += c;
            for (t, v) in total.iter_mut().zip(g) {
                *t = *t + v;
            }
        }
        let scale = T::one() / T::from_usize_lossy(n);
        total.iter_mut().for_each(|g| *g = *g * scale);
        Ok((loss * scale, correct, total))
    }

    /// Mean loss and accuracy over a set, without gradients.
    pub fn loss_and_accuracy(&self, inputs: &[T], labels: &[usize]) -> Result<(T, f64)> {
        let probs = self.forward(inputs)?;
        if labels.len() * self.arch.n_classes != probs.len() {
            return Err(Error::LengthMismatch {
                left: probs.len() / self.arch.n_classes,
                right: labels.len(),
            });
        }
        if labels.is_empty() {
            return Err(Error::Empty("evaluation set"));
        }
        let k = self.arch.n_classes;
        let mut loss = T::zero();
        let mut correct = 0;
        for (row, &y) in probs.chunks_exact(k).zip(labels) {
            loss = loss - row[y].max(T::min_positive_value()).ln();
            if argmax(row) == y {
                correct += 1;
            }
        }
        let n = labels.len();
        Ok((loss / T::from_usize_lossy(n), correct as f64 / n as f64))
    }

    fn trace(&self, image: &[T]) -> Trace<T> {
        let a = &self.arch;
        let l = &self.layout;
        let p = &self.params;

        let mut padded: [Vec<T>; 3] = Default::default();
        let mut act: [Vec<T>; 3] = Default::default();
        let mut pool_idx: [Vec<u32>; 3] = Default::default();

        padded[0] = pad(image, 1, a.height, a.width);
        let mut flat = Vec::new();
        for i in 0..3 {
            let (cin, cout, h, w) = a.stage(i);
            let mut out = conv_forward(
                &padded[i],
                &p[l.conv_w[i].clone()],
                &p[l.conv_b[i].clone()],
                cin,
                cout,
                h,
                w,
            );
            out.iter_mut().for_each(|v| *v = v.max(T::zero()));
            let (pooled, idx) = max_pool(&out, cout, h, w);
            act[i] = out;
            pool_idx[i] = idx;
            if i < 2 {
                padded[i + 1] = pad(&pooled, cout, h / 2, w / 2);
            } else {
                flat = pooled;
            }
        }

        let hidden: Vec<T> = dense(&p[l.fc1_w.clone()], &p[l.fc1_b.clone()], &flat)
            .into_iter()
            .map(|v| v.max(T::zero()))
            .collect();
        let logits = dense(&p[l.fc2_w.clone()], &p[l.fc2_b.clone()], &hidden);
        Trace {
            padded,
            act,
            pool_idx,
            flat,
            hidden,
            probs: softmax(&logits),
        }
    }

    /// Adds the cross-entropy gradient of one sample to `grad`.
    fn backward(&self, t: &Trace<T>, label: usize, grad: &mut [T]) {
        let a = &self.arch;
        let l = &self.layout;
        let p = &self.params;
        let (k, hid, flat_len) = (a.n_classes, a.hidden, t.flat.len());

        let mut dz2 = t.probs.clone();
        dz2[label] = dz2[label] - T::one();
        {
            let (gw, gb) = split_pair(grad, &l.fc2_w, &l.fc2_b);
            for c in 0..k {
                gb[c] = gb[c] + dz2[c];
                let row = &mut gw[c * hid..(c + 1) * hid];
                for (g, h) in row.iter_mut().zip(&t.hidden) {
                    *g = *g + dz2[c] * *h;
                }
            }
        }
        let w2 = &p[l.fc2_w.clone()];
        let mut dh = vec![T::zero(); hid];
        for c in 0..k {
            for (d, w) in dh.iter_mut().zip(&w2[c * hid..(c + 1) * hid]) {
                *d = *d + *w * dz2[c];
            }
        }
        for (d, h) in dh.iter_mut().zip(&t.hidden) {
            if *h <= T::zero() {
                *d = T::zero();
            }
        }

        {
            let (gw, gb) = split_pair(grad, &l.fc1_w, &l.fc1_b);
            for j in 0..hid {
                if dh[j] == T::zero() {
                    continue;
                }
                gb[j] = gb[j] + dh[j];
                let row = &mut gw[j * flat_len..(j + 1) * flat_len];
                for (g, x) in row.iter_mut().zip(&t.flat) {
                    *g = *g + dh[j] * *x;
                }
            }
        }
        let w1 = &p[l.fc1_w.clone()];
        let mut d_pooled = vec![T::zero(); flat_len];
        for j in 0..hid {
            if dh[j] == T::zero() {
                continue;
            }
            for (d, w) in d_pooled.iter_mut().zip(&w1[j * flat_len..(j + 1) * flat_len]) {
                *d = *d + *w * dh[j];
            }
        }

        for i in (0..3).rev() {
            let (cin, cout, h, w) = a.stage(i);
            // Route pooled gradients back to the chosen positions, then mask by ReLU.
            let mut d_act = vec![T::zero(); cout * h * w];
            for (d, &idx) in d_pooled.iter().zip(&t.pool_idx[i]) {
                d_act[idx as usize] = *d;
            }
            for (d, v) in d_act.iter_mut().zip(&t.act[i]) {
                if *v <= T::zero() {
                    *d = T::zero();
                }
            }
            let need_input_grad = i > 0;
            let d_padded = {
                let (gw, gb) = split_pair(grad, &l.conv_w[i], &l.conv_b[i]);
                conv_backward(
                    &t.padded[i],
                    &p[l.conv_w[i].clone()],
                    &d_act,
                    cin,
                    cout,
                    h,
                    w,
                    gw,
                    gb,
                    need_input_grad,
                )
            };
            if need_input_grad {
                d_pooled = unpad(&d_padded, cin, h, w);
            }
        }
    }
}

pub fn argmax<T: Real>(v: &[T]) -> usize {
    let mut best = 0;
    for i in 1..v.len() {
        if v[i] > v[best] {
            best = i;
        }
    }
    best
}

/// Numerically stable softmax.
pub fn softmax<T: Real>(logits: &[T]) -> Vec<T> {
    let max = logits.iter().copied().fold(T::neg_infinity(), T::max);
    let exps: Vec<T> = logits.iter().map(|z| (*z - max).exp()).collect();
    let total: T = exps.iter().copied().sum();
    exps.into_iter().map(|e| e / total).collect()
}

fn split_pair<'a, T>(grad: &'a mut [T], w: &Range<usize>, b: &Range<usize>) -> (&'a mut [T], &'a mut [T]) {
    debug_assert_eq!(w.end, b.start);
    let (head, tail) = grad[w.start..b.end].split_at_mut(w.len());
    (head, tail)
}

fn dense<T: Real>(w: &[T], b: &[T], x: &[T]) -> Vec<T> {
    let n_in = x.len();
    b.iter()
        .enumerate()
        .map(|(o, bias)| {
            let row = &w[o * n_in..(o + 1) * n_in];
            row.iter().zip(x).fold(*bias, |acc, (wv, xv)| acc + *wv * *xv)
        })
        .collect()
}

/// `c × h × w` → `c × (h+2) × (w+2)` with a zero border.
fn pad<T: Real>(x: &[T], c: usize, h: usize, w: usize) -> Vec<T> {
    let pw = w + 2;
    let mut out = vec![T::zero(); c * (h + 2) * pw];
    for ch in 0..c {
        for y in 0..h {
            let dst = ch * (h + 2) * pw + (y + 1) * pw + 1;
            out[dst..dst + w].copy_from_slice(&x[ch * h * w + y * w..ch * h * w + (y + 1) * w]);
        }
    }
    out
}

fn unpad<T: Real>(x: &[T], c: usize, h: usize, w: usize) -> Vec<T> {
    let pw = w + 2;
    let mut out = Vec::with_capacity(c * h * w);
    for ch in 0..c {
        for y in 0..h {
            let src = ch * (h + 2) * pw + (y + 1) * pw + 1;
            out.extend_from_slice(&x[src..src + w]);
        }
    }
    out
}

fn conv_forward<T: Real>(
    input: &[T],
    weights: &[T],
    bias: &[T],
    cin: usize,
    cout: usize,
    h: usize,
    w: usize,
) -> Vec<T> {
    let pw = w + 2;
    let plane = (h + 2) * pw;
    let mut out = vec![T::zero(); cout * h * w];
    for o in 0..cout {
        let dst = &mut out[o * h * w..(o + 1) * h * w];
        dst.iter_mut().for_each(|v| *v = bias[o]);
        for i in 0..cin {
            let src = &input[i * plane..(i + 1) * plane];
            for ky in 0..3 {
                for kx in 0..3 {
                    let wv = weights[((o * cin + i) * 3 + ky) * 3 + kx];
                    for y in 0..h {
                        let s = &src[(y + ky) * pw + kx..(y + ky) * pw + kx + w];
                        let d = &mut dst[y * w..(y + 1) * w];
                        for (dv, sv) in d.iter_mut().zip(s) {
                            *dv = *dv + wv * *sv;
                        }
                    }
                }
            }
        }
    }
    out
}

/// Accumulates weight and bias gradients; returns the padded input gradient
/// when requested (empty otherwise).
#[allow(clippy::too_many_arguments)]
fn conv_backward<T: Real>(
    input: &[T],
    weights: &[T],
    d_out: &[T],
    cin: usize,
    cout: usize,
    h: usize,
    w: usize,
    gw: &mut [T],
    gb: &mut [T],
    want_input: bool,
) -> Vec<T> {
    let pw = w + 2;
    let plane = (h + 2) * pw;
    let mut d_in = if want_input {
        vec![T::zero(); cin * plane]
    } else {
        Vec::new()
    };
    for o in 0..cout {
        let dout = &d_out[o * h * w..(o + 1) * h * w];
        if dout.iter().all(|v| *v == T::zero()) {
            continue;
        }
        gb[o] = gb[o] + dout.iter().copied().sum::<T>();
        for i in 0..cin {
            let src = &input[i * plane..(i + 1) * plane];
            for ky in 0..3 {
                for kx in 0..3 {
                    let widx = ((o * cin + i) * 3 + ky) * 3 + kx;
                    let mut acc = T::zero();
                    for y in 0..h {
                        let s = &src[(y + ky) * pw + kx..(y + ky) * pw + kx + w];
                        let d = &dout[y * w..(y + 1) * w];
                        acc = acc + s.iter().zip(d).fold(T::zero(), |a, (sv, dv)| a + *sv * *dv);
                    }
                    gw[widx] = gw[widx] + acc;
                    if want_input {
                        let wv = weights[widx];
                        let di = &mut d_in[i * plane..(i + 1) * plane];
                        for y in 0..h {
                            let t = &mut di[(y + ky) * pw + kx..(y + ky) * pw + kx + w];
                            let d = &dout[y * w..(y + 1) * w];
                            for (tv, dv) in t.iter_mut().zip(d) {
                                *tv = *tv + wv * *dv;
                            }
                        }
                    }
                }
            }
        }
    }
    d_in
}

/// 2×2 max pooling; ties keep the first position in row-major order.
fn max_pool<T: Real>(x: &[T], c: usize, h: usize, w: usize) -> (Vec<T>, Vec<u32>) {
    let (h2, w2) = (h / 2, w / 2);
    let mut out = Vec::with_capacity(c * h2 * w2);
    let mut idx = Vec::with_capacity(c * h2 * w2);
    for ch in 0..c {
        for y in 0..h2 {
            for xx in 0..w2 {
                let base = ch * h * w;
                let cands = [
                    base + 2 * y * w + 2 * xx,
                    base + 2 * y * w + 2 * xx + 1,
                    base + (2 * y + 1) * w + 2 * xx,
                    base + (2 * y + 1) * w + 2 * xx + 1,
                ];
                let mut best = cands[0];
                for &cand in &cands[1..] {
                    if x[cand] > x[best] {
                        best = cand;
                    }
                }
                out.push(x[best]);
                idx.push(best as u32);
            }
        }
    }
    (out, idx)
}
