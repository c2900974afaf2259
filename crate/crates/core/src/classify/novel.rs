use serde::{Deserialize, Serialize};

use crate::scalar::Real;

pub const DEFAULT_NOVELTY_THRESHOLD: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Novelty {
    Known(usize),
    Novel,
}

/// `Novel` iff the largest softmax entry is below `threshold`.
pub fn detect_novel<T: Real>(probs: &[T], threshold: f64) -> Novelty {
    let best = super::cnn::argmax(probs);
    if probs[best].to_f64_lossy() < threshold {
        Novelty::Novel
    } else {
        Novelty::Known(best)
    }
}
