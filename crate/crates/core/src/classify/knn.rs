use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

pub const DEFAULT_K: usize = 5;

/// k-nearest-neighbour classifier with Euclidean distance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Knn<T> {
    pub k: usize,
    pub n_classes: usize,
    pub dim: usize,
    /// Row-major exemplars, `labels.len() × dim`.
    pub exemplars: Vec<T>,
    pub labels: Vec<usize>,
}

pub fn train_knn<T: Real>(features: &[Vec<T>], labels: &[usize], n_classes: usize, k: usize) -> Result<Knn<T>> {
    if features.is_empty() {
        return Err(Error::Empty("training set"));
    }
    if features.len() != labels.len() {
        return Err(Error::LengthMismatch {
            left: features.len(),
            right: labels.len(),
        });
    }
    if k == 0 || k > features.len() {
        return Err(Error::invalid(format!("k = {k} must be in 1..={}", features.len())));
    }
    if let Some(&bad) = labels.iter().find(|&&l| l >= n_classes) {
        return Err(Error::invalid(format!(
            "label {bad} out of range for {n_classes} classes"
        )));
    }
    let dim = features[0].len();
    if features.iter().any(|f| f.len() != dim) {
        return Err(Error::invalid("feature vectors differ in length"));
    }
    Ok(Knn {
        k,
        n_classes,
        dim,
        exemplars: features.iter().flatten().copied().collect(),
        labels: labels.to_vec(),
    })
}

impl<T: Real> Knn<T> {
    /// Majority vote of the `k` nearest exemplars. Equal distances are
    /// ordered by label; vote ties go to the smallest summed distance, then
    /// the lowest class index.
    pub fn predict(&self, x: &[T]) -> usize {
        let mut dists: Vec<(T, usize)> = self
            .exemplars
            .chunks_exact(self.dim)
            .zip(&self.labels)
            .map(|(e, &l)| {
                let d2: T = e.iter().zip(x).map(|(a, b)| (*a - *b) * (*a - *b)).sum();
                (d2.sqrt(), l)
            })
            .collect();
        dists.sort_by(|a, b| {
            a.0.partial_cmp(&b.0)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.1.cmp(&b.1))
        });
        let mut votes = vec![0usize; self.n_classes];
        let mut dist_sum = vec![T::zero(); self.n_classes];
        for &(d, l) in &dists[..self.k] {
            votes[l] += 1;
            dist_sum[l] = dist_sum[l] + d;
        }
        let mut best = 0;
        for c in 1..self.n_classes {
            if votes[c] > votes[best] || (votes[c] == votes[best] && votes[c] > 0 && dist_sum[c] < dist_sum[best]) {
                best = c;
            }
        }
        best
    }
}
