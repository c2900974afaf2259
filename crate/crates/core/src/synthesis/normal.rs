//! The two normal (unjammed) signals: frequency hopping and BPSK.

use num_complex::Complex;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::seeded;
use crate::scalar::Real;
use crate::series::ComplexSeries;

pub const HOPS: usize = 6;

/// Six-hop frequency plan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FhSpec {
    pub hop_freqs: [f64; HOPS],
    pub hop_phases: [f64; HOPS],
    pub samples_per_hop: usize,
    pub sample_rate: f64,
}

impl FhSpec {
    pub fn n_samples(&self) -> usize {
        HOPS * self.samples_per_hop
    }

    pub fn validate(&self) -> Result<()> {
        check_rate(self.sample_rate)?;
        if self.samples_per_hop == 0 {
            return Err(Error::invalid("samples_per_hop must be >= 1"));
        }
        for &f in &self.hop_freqs {
            check_freq(f, self.sample_rate)?;
        }
        check_finite("hop phase", &self.hop_phases)
    }

    /// Hop index owning global sample `n`.
    pub fn hop_of(&self, n: usize) -> usize {
        (n / self.samples_per_hop).min(HOPS - 1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BpskSpec {
    /// Baud.
    pub symbol_rate: f64,
    pub carrier_freq: f64,
    /// Probability of sending symbol '0' (phase 0).
    pub bit_prob_zero: f64,
    pub n_samples: usize,
    pub sample_rate: f64,
}

impl BpskSpec {
    pub fn validate(&self) -> Result<()> {
        check_rate(self.sample_rate)?;
        check_freq(self.carrier_freq, self.sample_rate)?;
        if !(0.0..=1.0).contains(&self.bit_prob_zero) {
            return Err(Error::invalid(format!(
                "bit_prob_zero must lie in [0, 1], got {}",
                self.bit_prob_zero
            )));
        }
        if !self.symbol_rate.is_finite() || self.symbol_rate <= 0.0 {
            return Err(Error::invalid("symbol_rate must be > 0"));
        }
        if self.n_samples == 0 {
            return Err(Error::invalid("n_samples must be >= 1"));
        }
        Ok(())
    }

    pub fn samples_per_symbol(&self) -> f64 {
        self.sample_rate / self.symbol_rate
    }

    pub fn n_symbols(&self) -> usize {
        ((self.n_samples as f64) / self.samples_per_symbol()).ceil().max(1.0) as usize
    }

    pub fn symbol_of(&self, n: usize) -> usize {
        ((n as f64) * self.symbol_rate / self.sample_rate).floor() as usize
    }
}

pub(crate) fn check_rate(fs: f64) -> Result<()> {
    if fs > 0.0 && fs.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("sample rate must be > 0, got {fs}")))
    }
}

/// Frequencies must sit strictly inside (0, fs/2).
pub(crate) fn check_freq(freq: f64, sample_rate: f64) -> Result<()> {
    let nyquist = sample_rate / 2.0;
    if freq > 0.0 && freq < nyquist && freq.is_finite() {
        Ok(())
    } else {
        Err(Error::Nyquist { freq, nyquist })
    }
}

pub(crate) fn check_finite(what: &str, values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(Error::invalid(format!("{what} {i} is not finite"))),
        None => Ok(()),
    }
}

pub(crate) fn real_series<T: Real>(values: impl Iterator<Item = f64>, sample_rate: f64) -> ComplexSeries<T> {
    let samples: Vec<Complex<T>> = values.map(|v| Complex::new(T::lit(v), T::zero())).collect();
    ComplexSeries::from_parts_unchecked(samples, T::lit(sample_rate))
}

/// Frequency-hopping frame: hop `j` holds `cos(2π f_j n / fs + θ_j)` on the
/// global sample index `n`.
pub fn gen_fh<T: Real>(spec: &FhSpec) -> Result<ComplexSeries<T>> {
    spec.validate()?;
    let ts = 1.0 / spec.sample_rate;
    let values = (0..spec.n_samples()).map(|n| {
        let j = spec.hop_of(n);
        (2.0 * std::f64::consts::PI * spec.hop_freqs[j] * ts * n as f64 + spec.hop_phases[j]).cos()
    });
    Ok(real_series(values, spec.sample_rate))
}

/// Antipodal symbols `a_n ∈ {+1, -1}`: `+1` (symbol '0') with probability
/// `bit_prob_zero`, drawn in order from `random_bool` on the seeded stream.
pub fn bpsk_symbols(spec: &BpskSpec, rng_seed: u64) -> Result<Vec<i8>> {
    spec.validate()?;
    let mut rng = seeded(rng_seed);
    Ok((0..spec.n_symbols())
        .map(|_| if rng.random_bool(spec.bit_prob_zero) { 1 } else { -1 })
        .collect())
}

/// Rectangular-pulse BPSK on a cosine carrier.
pub fn gen_bpsk<T: Real>(spec: &BpskSpec, rng_seed: u64) -> Result<ComplexSeries<T>> {
    let symbols = bpsk_symbols(spec, rng_seed)?;
    let ts = 1.0 / spec.sample_rate;
    let values = (0..spec.n_samples).map(|n| {
        let a = f64::from(symbols[spec.symbol_of(n).min(symbols.len() - 1)]);
        a * (2.0 * std::f64::consts::PI * spec.carrier_freq * ts * n as f64).cos()
    });
    Ok(real_series(values, spec.sample_rate))
}
