use num_complex::Complex;
use rustfft::FftPlanner;

use crate::scalar::Real;
use crate::series::ComplexSeries;

/// Discrete analytic signal of the real part of `x`.
///
/// Positive-frequency bins are doubled, negative ones zeroed, DC and (for even
/// lengths) Nyquist kept once. The real part of the result is `Re x` exactly;
/// the imaginary part is the periodic discrete Hilbert transform.
pub fn analytic_signal<T: Real>(x: &ComplexSeries<T>) -> ComplexSeries<T> {
    let n = x.len();
    let mut buf: Vec<Complex<T>> = x.samples().iter().map(|s| Complex::new(s.re, T::zero())).collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut buf);

    let two = T::lit(2.0);
    let half = n / 2;
    // Bins 1..(n+1)/2 are strictly positive frequencies for both parities.
    for b in buf.iter_mut().take(n.div_ceil(2)).skip(1) {
        *b = *b * two;
    }
    for b in buf.iter_mut().skip(half + 1) {
        *b = Complex::new(T::zero(), T::zero());
    }
    planner.plan_fft_inverse(n).process(&mut buf);

    let scale = T::one() / T::from_usize_lossy(n);
    let samples = buf
        .iter()
        .zip(x.samples())
        .map(|(b, s)| Complex::new(s.re, b.im * scale))
        .collect();
    ComplexSeries::from_parts_unchecked(samples, x.sample_rate())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn dft(x: &[Complex<f64>]) -> Vec<Complex<f64>> {
        let n = x.len();
        (0..n)
            .map(|k| {
                x.iter()
                    .enumerate()
                    .map(|(i, v)| v * Complex::from_polar(1.0, -2.0 * PI * (k * i) as f64 / n as f64))
                    .sum()
            })
            .collect()
    }

    #[test]
    fn real_part_is_preserved_exactly() {
        let x: Vec<f64> = (0..97).map(|n| ((n * n) % 13) as f64 - 6.0).collect();
        let s = ComplexSeries::from_real(&x, 3.0).unwrap();
        let a = analytic_signal(&s);
        assert_eq!(a.real_part(), x);
        assert_eq!(a.sample_rate(), 3.0);
    }

    #[test]
    fn cosine_has_no_negative_frequency() {
        let n = 128;
        let f0 = 10.0 / n as f64;
        let x: Vec<f64> = (0..n).map(|i| (2.0 * PI * f0 * i as f64 + 0.4).cos()).collect();
        let a = analytic_signal(&ComplexSeries::from_real(&x, 1.0).unwrap());
        let spec = dft(a.samples());
        assert!(spec[n - 10].norm() < 1e-10);
        assert!((spec[10].norm() - n as f64).abs() < 1e-9);
    }

    #[test]
    fn imaginary_part_is_periodic_hilbert_convolution() {
        // Periodic Hilbert kernel for even N: h[k] = (2/N) sin²(πk/2) cot(πk/N).
        let n = 64;
        let kernel: Vec<f64> = (0..n)
            .map(|k| {
                if k == 0 {
                    0.0
                } else {
                    let kf = k as f64;
                    2.0 / n as f64 * (PI * kf / 2.0).sin().powi(2) / (PI * kf / n as f64).tan()
                }
            })
            .collect();
        let x: Vec<f64> = (0..n)
            .map(|i| ((i * 7 + 3) % 11) as f64 * 0.3 - 1.2 + (0.2 * i as f64).sin())
            .collect();
        let a = analytic_signal(&ComplexSeries::from_real(&x, 1.0).unwrap());
        for m in 0..n {
            let conv: f64 = (0..n).map(|k| kernel[k] * x[(m + n - k) % n]).sum();
            assert!((a.samples()[m].im - conv).abs() < 1e-10, "m={m}");
        }
    }

    #[test]
    fn works_in_single_precision() {
        let x: Vec<f32> = (0..50).map(|i| (0.3 * i as f32).cos()).collect();
        let a = analytic_signal(&ComplexSeries::from_real(&x, 1.0).unwrap());
        assert_eq!(a.real_part(), x);
    }
}
