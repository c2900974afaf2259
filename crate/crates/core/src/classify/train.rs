use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::cnn::Cnn;
use crate::error::{Error, Result};
use crate::rng::seeded;
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainConfig {
    pub batch_size: usize,
    pub learning_rate: f64,
    pub max_epochs: usize,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    /// Epochs without validation improvement before stopping. The learning
    /// rate is decayed after half as many.
    pub patience: usize,
    pub lr_decay: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            batch_size: 32,
            learning_rate: 0.001,
            max_epochs: 50,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            patience: 10,
            lr_decay: 0.5,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::invalid(m.to_string()));
        if self.batch_size == 0 || self.max_epochs == 0 {
            return bad("batch_size and max_epochs must be positive");
        }
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return bad("learning_rate must be finite and non-negative");
        }
        if !(0.0..1.0).contains(&self.beta1) || !(0.0..1.0).contains(&self.beta2) || self.epsilon <= 0.0 {
            return bad("Adam betas must be in [0, 1) and epsilon positive");
        }
        if self.patience == 0 {
            return bad("patience must be positive");
        }
        if !(self.lr_decay > 0.0 && self.lr_decay <= 1.0) {
            return bad("lr_decay must be in (0, 1]");
        }
        Ok(())
    }
}

/// Adam moment estimates for a flat parameter vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Adam<T> {
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub step: u64,
    m: Vec<T>,
    v: Vec<T>,
}

impl<T: Real> Adam<T> {
    pub fn new(n_params: usize, beta1: f64, beta2: f64, epsilon: f64) -> Self {
        Self {
            beta1,
            beta2,
            epsilon,
            step: 0,
            m: vec![T::zero(); n_params],
            v: vec![T::zero(); n_params],
        }
    }

    pub fn update(&mut self, params: &mut [T], grad: &[T], lr: f64) {
        self.step += 1;
        let (b1, b2) = (T::lit(self.beta1), T::lit(self.beta2));
        let (c1, c2) = (T::one() - b1, T::one() - b2);
        let t = self.step as i32;
        let bias1 = T::lit(1.0 - self.beta1.powi(t));
        let bias2 = T::lit(1.0 - self.beta2.powi(t));
        let (lr, eps) = (T::lit(lr), T::lit(self.epsilon));
        for (((p, g), m), v) in params.iter_mut().zip(grad).zip(&mut self.m).zip(&mut self.v) {
            *m = b1 * *m + c1 * *g;
            *v = b2 * *v + c2 * *g * *g;
            let m_hat = *m / bias1;
            let v_hat = *v / bias2;
            *p = *p - lr * m_hat / (v_hat.sqrt() + eps);
        }
    }
}

/// Images as one row-major buffer plus labels.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSet<T> {
    pub inputs: Vec<T>,
    pub labels: Vec<usize>,
    pub input_len: usize,
}

impl<T: Real> LabeledSet<T> {
    pub fn new(inputs: Vec<T>, labels: Vec<usize>, input_len: usize) -> Result<Self> {
        if input_len == 0 || inputs.len() != labels.len() * input_len {
            return Err(Error::Shape {
                expected: format!("{} x {input_len}", labels.len()),
                got: format!("{} values", inputs.len()),
            });
        }
        Ok(Self {
            inputs,
            labels,
            input_len,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn input(&self, i: usize) -> &[T] {
        &self.inputs[i * self.input_len..(i + 1) * self.input_len]
    }

    pub fn subset(&self, idx: &[usize]) -> Self {
        Self {
            inputs: idx.iter().flat_map(|&i| self.input(i).iter().copied()).collect(),
            labels: idx.iter().map(|&i| self.labels[i]).collect(),
            input_len: self.input_len,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    pub train_accuracy: f64,
    pub val_loss: f64,
    pub val_accuracy: f64,
    pub learning_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainHistory {
    pub epochs: Vec<EpochRecord>,
    /// 1-based epoch whose weights were kept.
    pub best_epoch: usize,
    pub stopped_early: bool,
}

impl TrainHistory {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("epoch,train_loss,train_accuracy,val_loss,val_accuracy,learning_rate\n");
        for e in &self.epochs {
            s.push_str(&format!(
                "{},{},{},{},{},{}\n",
                e.epoch, e.train_loss, e.train_accuracy, e.val_loss, e.val_accuracy, e.learning_rate
            ));
        }
        s
    }
}

/// Mini-batch Adam on mean cross-entropy. Batches are reshuffled every epoch
/// from `cfg.seed`; the weights with the lowest validation loss are kept.
pub fn train_cnn<T: Real>(
    model: &mut Cnn<T>,
    train: &LabeledSet<T>,
    val: &LabeledSet<T>,
    cfg: &TrainConfig,
) -> Result<TrainHistory> {
    cfg.validate()?;
    if train.is_empty() {
        return Err(Error::Empty("training split"));
    }
    if val.is_empty() {
        return Err(Error::Empty("validation split"));
    }
    let d = model.arch().input_len();
    if train.input_len != d || val.input_len != d {
        return Err(Error::Shape {
            expected: format!("{d} values per image"),
            got: format!("{}", train.input_len),
        });
    }

    let mut adam = Adam::new(model.params().len(), cfg.beta1, cfg.beta2, cfg.epsilon);
    let mut rng = seeded(cfg.seed);
    let mut order: Vec<usize> = (0..train.len()).collect();
    let mut lr = cfg.learning_rate;
    let mut best_loss = f64::INFINITY;
    let mut best_params = model.params().to_vec();
    let mut best_epoch = 0;
    let mut since_best = 0;
    let mut since_decay = 0;
    let decay_after = (cfg.patience / 2).max(1);
    let mut epochs = Vec::new();
    let mut stopped_early = false;

    let mut batch_inputs = Vec::with_capacity(cfg.batch_size * d);
    let mut batch_labels = Vec::with_capacity(cfg.batch_size);
    for epoch in 1..=cfg.max_epochs {
        order.shuffle(&mut rng);
        let mut loss_sum = 0.0;
        let mut correct = 0;
        for batch in order.chunks(cfg.batch_size) {
            batch_inputs.clear();
            batch_labels.clear();
            for &i in batch {
                batch_inputs.extend_from_slice(train.input(i));
                batch_labels.push(train.labels[i]);
            }
            let (loss, right, grad) = model.loss_and_gradients(&batch_inputs, &batch_labels)?;
            let loss = loss.to_f64_lossy();
            if !loss.is_finite() || grad.iter().any(|g| !g.is_finite()) {
                return Err(Error::Diverged {
                    epoch,
                    detail: format!("batch loss {loss} at learning rate {lr}"),
                });
            }
            loss_sum += loss * batch.len() as f64;
            correct += right;
            adam.update(model.params_mut(), &grad, lr);
        }
        let (val_loss, val_accuracy) = model.loss_and_accuracy(&val.inputs, &val.labels)?;
        let val_loss = val_loss.to_f64_lossy();
        if !val_loss.is_finite() {
            return Err(Error::Diverged {
                epoch,
                detail: format!("validation loss {val_loss}"),
            });
        }
        epochs.push(EpochRecord {
            epoch,
            train_loss: loss_sum / train.len() as f64,
            train_accuracy: correct as f64 / train.len() as f64,
            val_loss,
            val_accuracy,
            learning_rate: lr,
        });
        if val_loss < best_loss {
            best_loss = val_loss;
            best_params.copy_from_slice(model.params());
            best_epoch = epoch;
            since_best = 0;
            since_decay = 0;
        } else {
            since_best += 1;
            since_decay += 1;
            if since_best >= cfg.patience {
                stopped_early = epoch < cfg.max_epochs;
                break;
            }
            if since_decay >= decay_after {
                lr *= cfg.lr_decay;
                since_decay = 0;
            }
        }
    }
    model.params_mut().copy_from_slice(&best_params);
    Ok(TrainHistory {
        epochs,
        best_epoch,
        stopped_early,
    })
}

/// Per-class random hold-out: `round(fraction · n_c)` samples of each class
/// (at least one when the class has two or more) go to the second list.
pub fn stratified_split(labels: &[usize], fraction: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(0.0..1.0).contains(&fraction) {
        return Err(Error::invalid("hold-out fraction must be in [0, 1)"));
    }
    let n_classes = labels.iter().copied().max().map_or(0, |m| m + 1);
    let mut rng = seeded(seed);
    let mut keep = Vec::new();
    let mut hold = Vec::new();
    for c in 0..n_classes {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == c).collect();
        members.shuffle(&mut rng);
        let mut n_hold = (fraction * members.len() as f64).round() as usize;
        if fraction > 0.0 && n_hold == 0 && members.len() >= 2 {
            n_hold = 1;
        }
        hold.extend_from_slice(&members[..n_hold]);
        keep.extend_from_slice(&members[n_hold..]);
    }
    keep.sort_unstable();
    hold.sort_unstable();
    Ok((keep, hold))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::cnn::CnnArch;

    /// Bright left half versus bright right half, with a little texture.
    fn toy(n: usize, seed: u64) -> LabeledSet<f32> {
        use rand::Rng;
        let mut rng = seeded(seed);
        let mut inputs = Vec::new();
        let mut labels = Vec::new();
        for i in 0..n {
            let c = i % 2;
            for _y in 0..8 {
                for x in 0..8 {
                    let on = (x < 4) == (c == 0);
                    inputs.push(if on { 0.7 } else { 0.2 } + rng.random_range(-0.2f32..0.2));
                }
            }
            labels.push(c);
        }
        LabeledSet::new(inputs, labels, 64).unwrap()
    }

    fn quick_cfg() -> TrainConfig {
        TrainConfig {
            batch_size: 8,
            learning_rate: 0.003,
            max_epochs: 50,
            patience: 10,
            seed: 3,
            ..TrainConfig::default()
        }
    }

    #[test]
    fn overfits_toy_problem() {
        let train = toy(50, 1);
        let mut net = Cnn::new(CnnArch::compact(8, 8, 2), 7).unwrap();
        let hist = train_cnn(&mut net, &train, &toy(20, 2), &quick_cfg()).unwrap();
        let (_, acc) = net.loss_and_accuracy(&train.inputs, &train.labels).unwrap();
        assert!(acc >= 0.95, "{acc} after {} epochs", hist.epochs.len());
    }

    #[test]
    fn zero_learning_rate_freezes_weights() {
        let mut net = Cnn::<f32>::new(CnnArch::compact(8, 8, 2), 7).unwrap();
        let before = net.params().to_vec();
        let cfg = TrainConfig {
            learning_rate: 0.0,
            max_epochs: 4,
            patience: 2,
            ..quick_cfg()
        };
        train_cnn(&mut net, &toy(20, 1), &toy(6, 2), &cfg).unwrap();
        assert_eq!(net.params(), &before[..]);
    }

    #[test]
    fn training_is_deterministic() {
        let run = || {
            let mut net = Cnn::<f32>::new(CnnArch::compact(8, 8, 2), 9).unwrap();
            let cfg = TrainConfig {
                max_epochs: 5,
                patience: 4,
                ..quick_cfg()
            };
            let h = train_cnn(&mut net, &toy(40, 1), &toy(10, 2), &cfg).unwrap();
            (net.params().to_vec(), h)
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn divergence_is_reported() {
        let mut net = Cnn::<f32>::new(CnnArch::compact(8, 8, 2), 7).unwrap();
        let mut bad = toy(10, 1);
        bad.inputs[5] = f32::NAN;
        let cfg = TrainConfig {
            max_epochs: 3,
            patience: 2,
            ..quick_cfg()
        };
        assert!(matches!(
            train_cnn(&mut net, &bad, &toy(4, 2), &cfg),
            Err(Error::Diverged { .. })
        ));
    }

    #[test]
    fn defaults_and_validation() {
        let c = TrainConfig::default();
        assert_eq!((c.batch_size, c.learning_rate, c.max_epochs), (32, 0.001, 50));
        c.validate().unwrap();
        TrainConfig {
            patience: 50,
            ..c.clone()
        }
        .validate()
        .unwrap();
        assert!(TrainConfig {
            patience: 0,
            ..c.clone()
        }
        .validate()
        .is_err());
        assert!(TrainConfig { batch_size: 0, ..c }.validate().is_err());
    }

    #[test]
    fn stratified_hold_out() {
        let labels: Vec<usize> = (0..100).map(|i| i % 4).collect();
        let (keep, hold) = stratified_split(&labels, 0.15, 1).unwrap();
        assert_eq!(keep.len() + hold.len(), 100);
        for c in 0..4 {
            assert_eq!(hold.iter().filter(|&&i| labels[i] == c).count(), 4);
        }
        assert_eq!(stratified_split(&labels, 0.15, 1).unwrap(), (keep, hold));
    }
}
