use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Uniformly sampled complex time series.
///
/// Non-empty, strictly positive sample rate, every sample finite.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSeries<T> {
    samples: Vec<Complex<T>>,
    sample_rate: T,
}

impl<T: Real> ComplexSeries<T> {
    pub fn new(samples: Vec<Complex<T>>, sample_rate: T) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Empty("complex series"));
        }
        if !sample_rate.is_finite() || sample_rate <= T::zero() {
            return Err(Error::invalid(format!("sample rate must be > 0, got {sample_rate}")));
        }
        if let Some(i) = samples.iter().position(|s| !s.re.is_finite() || !s.im.is_finite()) {
            return Err(Error::invalid(format!("sample {i} is not finite")));
        }
        Ok(Self { samples, sample_rate })
    }

    /// Wraps a real sequence with zero imaginary parts.
    pub fn from_real(values: &[T], sample_rate: T) -> Result<Self> {
        Self::new(
            values.iter().map(|&v| Complex::new(v, T::zero())).collect(),
            sample_rate,
        )
    }

    pub(crate) fn from_parts_unchecked(samples: Vec<Complex<T>>, sample_rate: T) -> Self {
        debug_assert!(!samples.is_empty());
        Self { samples, sample_rate }
    }

    pub fn samples(&self) -> &[Complex<T>] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex<T>> {
        self.samples
    }

    pub fn sample_rate(&self) -> T {
        self.sample_rate
    }

    pub fn sample_period(&self) -> T {
        T::one() / self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn is_real(&self) -> bool {
        self.samples.iter().all(|s| s.im == T::zero())
    }

    pub fn real_part(&self) -> Vec<T> {
        self.samples.iter().map(|s| s.re).collect()
    }

    pub fn power(&self) -> T {
        measure_power(self)
    }

    pub fn scaled(&self, factor: T) -> Self {
        Self::from_parts_unchecked(self.samples.iter().map(|s| s * factor).collect(), self.sample_rate)
    }

    pub(crate) fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch {
                left: self.len(),
                right: other.len(),
            });
        }
        if self.sample_rate != other.sample_rate {
            return Err(Error::SampleRateMismatch {
                left: self.sample_rate.to_f64_lossy(),
                right: other.sample_rate.to_f64_lossy(),
            });
        }
        Ok(())
    }

    /// Element-wise sum of two compatible series.
    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(Self::from_parts_unchecked(
            self.samples.iter().zip(&other.samples).map(|(a, b)| a + b).collect(),
            self.sample_rate,
        ))
    }
}

/// Mean of `|x[n]|²` over the frame.
pub fn measure_power<T: Real>(series: &ComplexSeries<T>) -> T {
    let n = T::from_usize_lossy(series.len());
    series.samples().iter().map(|s| s.norm_sqr()).sum::<T>() / n
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_and_bad_rate() {
        assert!(ComplexSeries::<f64>::new(vec![], 1.0).is_err());
        assert!(ComplexSeries::from_real(&[1.0f64], 0.0).is_err());
        assert!(ComplexSeries::from_real(&[f64::NAN], 1.0).is_err());
    }

    #[test]
    fn power_of_zeros_is_zero() {
        let s = ComplexSeries::from_real(&[0.0f64; 16], 1.0).unwrap();
        assert_eq!(measure_power(&s), 0.0);
    }

    #[test]
    fn power_of_unit_exponential_is_one() {
        let samples = (0..100).map(|n| Complex::from_polar(1.0f64, 0.37 * n as f64)).collect();
        let s = ComplexSeries::new(samples, 10.0).unwrap();
        assert!((measure_power(&s) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cosine_power_over_whole_periods() {
        // sqrt(2 P) cos over an integer number of periods has power P.
        let p = 2.0f64;
        let x: Vec<f64> = (0..600)
            .map(|n| (2.0 * p).sqrt() * (2.0 * std::f64::consts::PI * n as f64 / 40.0 + 0.3).cos())
            .collect();
        let s = ComplexSeries::from_real(&x, 1.0).unwrap();
        assert!((measure_power(&s) - p).abs() < 1e-12);
    }
}
