use num_complex::Complex;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::series::ComplexSeries;

use super::window::{LagWindow, TimeWindow, WindowSpec};

pub const DEFAULT_FREQ_BINS: usize = 256;

/// Real time-frequency energy grid, row-major with one row per time instant.
#[derive(Debug, Clone, PartialEq)]
pub struct TfGrid<T> {
    values: Vec<T>,
    n_time: usize,
    n_freq: usize,
    time_axis: Vec<T>,
    freq_axis: Vec<T>,
}

impl<T: Real> TfGrid<T> {
    pub fn new(values: Vec<T>, n_time: usize, n_freq: usize, time_axis: Vec<T>, freq_axis: Vec<T>) -> Result<Self> {
        if values.len() != n_time * n_freq {
            return Err(Error::Shape {
                expected: format!("{n_time}x{n_freq}"),
                got: format!("{} values", values.len()),
            });
        }
        if time_axis.len() != n_time || freq_axis.len() != n_freq {
            return Err(Error::invalid("axis lengths do not match grid shape"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("grid values must be finite"));
        }
        Ok(Self {
            values,
            n_time,
            n_freq,
            time_axis,
            freq_axis,
        })
    }

    pub fn n_time(&self) -> usize {
        self.n_time
    }

    pub fn n_freq(&self) -> usize {
        self.n_freq
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn value(&self, n: usize, k: usize) -> T {
        self.values[n * self.n_freq + k]
    }

    pub fn slice(&self, n: usize) -> &[T] {
        &self.values[n * self.n_freq..(n + 1) * self.n_freq]
    }

    /// Seconds.
    pub fn time_axis(&self) -> &[T] {
        &self.time_axis
    }

    /// Hz.
    pub fn freq_axis(&self) -> &[T] {
        &self.freq_axis
    }

    /// Bin spacing in Hz.
    pub fn freq_resolution(&self) -> T {
        if self.n_freq > 1 {
            self.freq_axis[1] - self.freq_axis[0]
        } else {
            T::zero()
        }
    }

    /// Nearest bin to `freq` (Hz), clamped to the grid.
    pub fn bin_of(&self, freq: T) -> usize {
        let df = self.freq_resolution();
        if df <= T::zero() {
            return 0;
        }
        let k = (freq / df).round().to_f64_lossy().max(0.0) as usize;
        k.min(self.n_freq - 1)
    }

    /// Argmax bin of each time slice (first maximum wins).
    pub fn ridge(&self) -> Vec<usize> {
        (0..self.n_time)
            .map(|n| {
                let row = self.slice(n);
                let mut best = 0;
                for (k, v) in row.iter().enumerate() {
                    if *v > row[best] {
                        best = k;
                    }
                }
                best
            })
            .collect()
    }

    /// Sum of squared values over the inclusive bin range on the given slices.
    pub fn band_energy(&self, times: std::ops::Range<usize>, bins: std::ops::RangeInclusive<usize>) -> T {
        let mut acc = T::zero();
        for n in times {
            for k in bins.clone() {
                let v = self.value(n, k);
                acc = acc + v * v;
            }
        }
        acc
    }
}

/// Which distribution to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum TfMethod {
    Wvd,
    Pwvd,
    #[default]
    Spwvd,
}

impl TfMethod {
    pub fn compute<T: Real>(
        &self,
        x: &ComplexSeries<T>,
        windows: &WindowSpec,
        n_freq_bins: usize,
    ) -> Result<TfGrid<T>> {
        match self {
            TfMethod::Wvd => wvd(x, n_freq_bins),
            TfMethod::Pwvd => pwvd(x, &windows.lag, n_freq_bins),
            TfMethod::Spwvd => spwvd(x, windows, n_freq_bins),
        }
    }
}

impl std::str::FromStr for TfMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "wvd" => Ok(Self::Wvd),
            "pwvd" => Ok(Self::Pwvd),
            "spwvd" => Ok(Self::Spwvd),
            other => Err(Error::invalid(format!("unknown time-frequency method '{other}'"))),
        }
    }
}

pub fn wvd<T: Real>(x: &ComplexSeries<T>, n_freq_bins: usize) -> Result<TfGrid<T>> {
    spwvd(x, &WindowSpec::trivial(), n_freq_bins)
}

pub fn pwvd<T: Real>(x: &ComplexSeries<T>, lag: &LagWindow, n_freq_bins: usize) -> Result<TfGrid<T>> {
    spwvd(
        x,
        &WindowSpec {
            time: TimeWindow::Dirac,
            lag: lag.clone(),
        },
        n_freq_bins,
    )
}

/// Smoothed pseudo Wigner-Ville distribution.
///
/// Bin `k` is the frequency `k·fs/(2·n_freq_bins)`. Values are scaled by
/// `2/fs`, so each slice integrates (times the bin width) to the time-smoothed
/// instantaneous power. The time window is normalized to unit sum.
pub fn spwvd<T: Real>(x: &ComplexSeries<T>, w: &WindowSpec, n_freq_bins: usize) -> Result<TfGrid<T>> {
    let spectra = lag_spectra(x, w, n_freq_bins)?;
    let fs = x.sample_rate();
    let scale = T::lit(2.0) / fs;
    let values = spectra.iter().map(|c| c.re * scale).collect();
    let n = x.len();
    let time_axis = (0..n).map(|i| T::from_usize_lossy(i) / fs).collect();
    let df = fs / T::from_usize_lossy(2 * n_freq_bins);
    let freq_axis = (0..n_freq_bins).map(|k| T::from_usize_lossy(k) * df).collect();
    TfGrid::new(values, n, n_freq_bins, time_axis, freq_axis)
}

/// Complex lag-DFT output per time slice, before taking the real part.
pub(crate) fn lag_spectra<T: Real>(x: &ComplexSeries<T>, w: &WindowSpec, nfft: usize) -> Result<Vec<Complex<T>>> {
    let n = x.len();
    if n == 0 {
        return Err(Error::Empty("signal"));
    }
    if nfft < 2 {
        return Err(Error::invalid("n_freq_bins must be >= 2"));
    }
    for (name, len) in [
        (
            "time",
            match &w.time {
                TimeWindow::Dirac => 1,
                TimeWindow::Taper(t) => t.len(),
            },
        ),
        (
            "lag",
            match &w.lag {
                LagWindow::Rectangular => 1,
                LagWindow::Taper(t) => t.len(),
            },
        ),
    ] {
        if len > 2 * n {
            return Err(Error::invalid(format!(
                "{name} window length {len} exceeds twice the signal length {n}"
            )));
        }
    }

    let g: Vec<T> = match &w.time {
        TimeWindow::Dirac => vec![T::one()],
        TimeWindow::Taper(t) => {
            let total: f64 = t.values().iter().sum();
            t.values().iter().map(|v| T::lit(v / total)).collect()
        }
    };
    let lt = (g.len() / 2) as isize;
    let max_lag = {
        let by_fft = (nfft - 1) / 2;
        let by_len = n - 1;
        match &w.lag {
            LagWindow::Rectangular => by_fft.min(by_len),
            LagWindow::Taper(t) => t.half_len().min(by_fft).min(by_len),
        }
    };
    let h: Vec<T> = (0..=max_lag)
        .map(|m| match &w.lag {
            LagWindow::Rectangular => T::one(),
            LagWindow::Taper(t) => T::lit(t.at(m as isize)),
        })
        .collect();

    let fft = FftPlanner::<T>::new().plan_fft_forward(nfft);
    let xs = x.samples();
    let zero = Complex::new(T::zero(), T::zero());
    let mut out = vec![zero; n * nfft];
    out.par_chunks_mut(nfft).enumerate().for_each(|(t, row)| {
        for (m, hm) in h.iter().enumerate() {
            let mut acc = zero;
            for (gi, gp) in g.iter().enumerate() {
                let c = t as isize + gi as isize - lt;
                let (a, b) = (c + m as isize, c - m as isize);
                if b < 0 || a >= n as isize {
                    continue;
                }
                acc = acc + xs[a as usize] * xs[b as usize].conj() * *gp;
            }
            row[m] = acc * *hm;
            if m > 0 {
                // The kernel at -m is the conjugate of the kernel at +m.
                row[nfft - m] = row[m].conj();
            }
        }
        fft.process(row);
    });
    Ok(out)
}
