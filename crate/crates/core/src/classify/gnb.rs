use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Variances are floored at this fraction of the largest global feature variance.
pub const VARIANCE_FLOOR_FRACTION: f64 = 1e-6;
/// Floor used when every feature is globally constant.
pub const ABSOLUTE_VARIANCE_FLOOR: f64 = 1e-12;

/// Gaussian naive Bayes. Classes absent from training are never predicted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianNb<T> {
    pub n_classes: usize,
    pub dim: usize,
    /// `ln(prior)`; `-inf` for absent classes.
    pub log_priors: Vec<T>,
    /// Row-major `n_classes × dim`.
    pub means: Vec<T>,
    pub variances: Vec<T>,
}

pub fn train_gnb<T: Real>(features: &[Vec<T>], labels: &[usize], n_classes: usize) -> Result<GaussianNb<T>> {
    if features.is_empty() {
        return Err(Error::Empty("training set"));
    }
    if features.len() != labels.len() {
        return Err(Error::LengthMismatch {
            left: features.len(),
            right: labels.len(),
        });
    }
    let dim = features[0].len();
    if features.iter().any(|f| f.len() != dim) {
        return Err(Error::invalid("feature vectors differ in length"));
    }
    let mut counts = vec![0usize; n_classes];
    for &l in labels {
        if l >= n_classes {
            return Err(Error::invalid(format!(
                "label {l} out of range for {n_classes} classes"
            )));
        }
        counts[l] += 1;
    }
    if let Some(c) = counts.iter().position(|&n| n == 1) {
        return Err(Error::invalid(format!(
            "class {c} has a single sample; at least 2 are required"
        )));
    }

    let n = features.len() as f64;
    let mut floor: f64 = 0.0;
    for j in 0..dim {
        let mean = features.iter().map(|f| f[j].to_f64_lossy()).sum::<f64>() / n;
        let var = features
            .iter()
            .map(|f| (f[j].to_f64_lossy() - mean).powi(2))
            .sum::<f64>()
            / n;
        floor = floor.max(var);
    }
    floor *= VARIANCE_FLOOR_FRACTION;
    if floor <= 0.0 {
        floor = ABSOLUTE_VARIANCE_FLOOR;
    }

    let mut means = vec![T::zero(); n_classes * dim];
    let mut variances = vec![T::lit(floor); n_classes * dim];
    let mut log_priors = vec![T::neg_infinity(); n_classes];
    for c in 0..n_classes {
        if counts[c] == 0 {
            continue;
        }
        let members: Vec<&Vec<T>> = features
            .iter()
            .zip(labels)
            .filter(|(_, &l)| l == c)
            .map(|(f, _)| f)
            .collect();
        let m = members.len() as f64;
        log_priors[c] = T::lit((m / n).ln());
        for j in 0..dim {
            let mean = members.iter().map(|f| f[j].to_f64_lossy()).sum::<f64>() / m;
            let var = members
                .iter()
                .map(|f| (f[j].to_f64_lossy() - mean).powi(2))
                .sum::<f64>()
                / m;
            means[c * dim + j] = T::lit(mean);
            variances[c * dim + j] = T::lit(var.max(floor));
        }
    }
    Ok(GaussianNb {
        n_classes,
        dim,
        log_priors,
        means,
        variances,
    })
}

impl<T: Real> GaussianNb<T> {
    /// `ln p(c) + Σ_j ln N(x_j; μ_cj, σ²_cj)` per class.
    pub fn log_joint(&self, x: &[T]) -> Vec<T> {
        let half_ln_2pi = T::lit(0.5 * (2.0 * std::f64::consts::PI).ln());
        let half = T::lit(0.5);
        (0..self.n_classes)
            .map(|c| {
                if self.log_priors[c] == T::neg_infinity() {
                    return T::neg_infinity();
                }
                let mut acc = self.log_priors[c];
                for j in 0..self.dim {
                    let (mu, var) = (self.means[c * self.dim + j], self.variances[c * self.dim + j]);
                    let d = x[j] - mu;
                    acc = acc - half_ln_2pi - half * var.ln() - half * d * d / var;
                }
                acc
            })
            .collect()
    }

    /// Normalized class posterior.
    pub fn posterior(&self, x: &[T]) -> Vec<T> {
        let lj = self.log_joint(x);
        let max = lj.iter().copied().fold(T::neg_infinity(), T::max);
        let exps: Vec<T> = lj.iter().map(|v| (*v - max).exp()).collect();
        let total: T = exps.iter().copied().sum();
        exps.into_iter().map(|e| e / total).collect()
    }

    pub fn predict(&self, x: &[T]) -> usize {
        let lj = self.log_joint(x);
        let mut best = 0;
        for c in 1..lj.len() {
            if lj[c] > lj[best] {
                best = c;
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn disjoint_supports_are_separated() {
        let f: Vec<Vec<f64>> = [0.0, 0.2, 0.4, 10.0, 10.3, 10.1].iter().map(|v| vec![*v]).collect();
        let l = [0, 0, 0, 1, 1, 1];
        let m = train_gnb(&f, &l, 2).unwrap();
        for (x, y) in f.iter().zip(l) {
            assert_eq!(m.predict(x), y);
        }
    }

    #[test]
    fn constant_feature_stays_finite() {
        let f = vec![vec![1.0, 0.0], vec![1.0, 1.0], vec![1.0, 5.0], vec![1.0, 6.0]];
        let m = train_gnb(&f, &[0, 0, 1, 1], 2).unwrap();
        assert!(m.log_joint(&[1.0, 0.5]).iter().all(|v: &f64| v.is_finite()));
        assert!(m.log_joint(&[3.0, 0.5]).iter().all(|v: &f64| v.is_finite()));
        let all_const = vec![vec![2.0]; 4];
        let m = train_gnb(&all_const, &[0, 0, 1, 1], 2).unwrap();
        assert!(m.posterior(&[2.0]).iter().all(|v: &f64| v.is_finite()));
    }

    #[test]
    fn singleton_class_rejected() {
        assert!(train_gnb(&[vec![0.0], vec![1.0], vec![2.0]], &[0, 0, 1], 2).is_err());
    }

    #[test]
    fn matches_direct_bayes_rule() {
        let f: Vec<Vec<f64>> = (0..21)
            .map(|i| {
                let i = i as f64;
                vec![
                    (i * 1.3).sin() + i * 0.1,
                    (i * 0.7).cos(),
                    2.0 * (i * 0.37).sin(),
                    (i * i * 0.01).sqrt(),
                ]
            })
            .collect();
        let l: Vec<usize> = (0..21).map(|i| [0, 1, 2, 2][i % 4]).collect();
        let m = train_gnb(&f, &l, 3).unwrap();
        let q = [0.3, -0.2, 1.5, 0.9];

        let mut joint = [0.0; 3];
        for c in 0..3 {
            let rows: Vec<&Vec<f64>> = f.iter().zip(&l).filter(|(_, &y)| y == c).map(|(x, _)| x).collect();
            let n = rows.len() as f64;
            let mut p = n / 21.0;
            for j in 0..4 {
                let mu = rows.iter().map(|r| r[j]).sum::<f64>() / n;
                let var = rows.iter().map(|r| (r[j] - mu).powi(2)).sum::<f64>() / n;
                p *= (-(q[j] - mu).powi(2) / (2.0 * var)).exp() / (2.0 * PI * var).sqrt();
            }
            joint[c] = p;
        }
        let total: f64 = joint.iter().sum();
        for (a, b) in m.posterior(&q).iter().zip(joint.iter().map(|j| j / total)) {
            assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
    }

    #[test]
    fn shift_of_equal_variance_feature_keeps_decisions() {
        // Symmetric fixture: feature 1 has identical spread in both classes.
        let f = vec![
            vec![0.0, 1.0],
            vec![1.0, 3.0],
            vec![0.5, 2.0],
            vec![4.0, 2.0],
            vec![5.0, 1.0],
            vec![4.5, 3.0],
        ];
        let l = [0, 0, 0, 1, 1, 1];
        let shifted: Vec<Vec<f64>> = f.iter().map(|v| vec![v[0], v[1] + 7.25]).collect();
        let a = train_gnb(&f, &l, 2).unwrap();
        let b = train_gnb(&shifted, &l, 2).unwrap();
        for q in [[0.3, 1.1], [2.4, 2.9], [2.6, 0.0], [4.9, 3.3]] {
            assert_eq!(a.predict(&q), b.predict(&[q[0], q[1] + 7.25]));
        }
    }
}
