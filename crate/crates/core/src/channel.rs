//! Propagation channels: AWGN, block Rayleigh fading and a tapped-delay
//! frequency-selective channel, each followed by AWGN at a requested SNR.
//!
//! SNR is always measured against the signal *after* fading/filtering, so
//! the SNR axis means the same thing for every channel.

use num_complex::Complex;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{seeded, SeededRng};
use crate::scalar::Real;
use crate::series::{measure_power, ComplexSeries};

pub const RAYLEIGH_SIGMA: f64 = 0.5;
pub const TWO_PATH_DELAY: usize = 50;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ChannelModel {
    Gaussian,
    /// One Rayleigh-magnitude, uniform-phase gain per frame.
    RayleighBlock {
        sigma: f64,
    },
    /// `y[n] = Σ g_i x[n - d_i]` with `x` zero before the frame.
    FreqSelective {
        tap_delays: Vec<usize>,
        tap_gains: Vec<f64>,
    },
}

impl ChannelModel {
    pub fn rayleigh() -> Self {
        ChannelModel::RayleighBlock { sigma: RAYLEIGH_SIGMA }
    }

    /// Direct path plus one equal-power echo `delay` samples later.
    pub fn two_path(delay: usize) -> Self {
        let g = std::f64::consts::FRAC_1_SQRT_2;
        ChannelModel::FreqSelective {
            tap_delays: vec![0, delay],
            tap_gains: vec![g, g],
        }
    }

    /// Builds a tapped-delay channel, normalizing gains to unit total power.
    pub fn freq_selective(tap_delays: Vec<usize>, tap_gains: Vec<f64>) -> Result<Self> {
        let total: f64 = tap_gains.iter().map(|g| g * g).sum();
        if !total.is_finite() || total <= 0.0 {
            return Err(Error::invalid("tap gains must have positive finite power"));
        }
        let norm = total.sqrt();
        let model = ChannelModel::FreqSelective {
            tap_delays,
            tap_gains: tap_gains.into_iter().map(|g| g / norm).collect(),
        };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ChannelModel::Gaussian => Ok(()),
            ChannelModel::RayleighBlock { sigma } => {
                if *sigma > 0.0 && sigma.is_finite() {
                    Ok(())
                } else {
                    Err(Error::invalid(format!("Rayleigh sigma must be > 0, got {sigma}")))
                }
            }
            ChannelModel::FreqSelective { tap_delays, tap_gains } => {
                if tap_delays.is_empty() || tap_delays.len() != tap_gains.len() {
                    return Err(Error::invalid("taps need matching, non-empty delays and gains"));
                }
                if tap_delays[0] != 0 || tap_delays.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::invalid("tap delays must start at 0 and strictly increase"));
                }
                let total: f64 = tap_gains.iter().map(|g| g * g).sum();
                if (total - 1.0).abs() > 1e-9 {
                    return Err(Error::invalid(format!(
                        "tap gains must have unit total power, got {total}"
                    )));
                }
                Ok(())
            }
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            ChannelModel::Gaussian => "gaussian",
            ChannelModel::RayleighBlock { .. } => "rayleigh-block",
            ChannelModel::FreqSelective { .. } => "freq-selective",
        }
    }
}

/// A channel model paired with the post-channel SNR.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Channel {
    pub model: ChannelModel,
    pub snr_db: f64,
}

impl Channel {
    pub fn new(model: ChannelModel, snr_db: f64) -> Self {
        Self { model, snr_db }
    }
}

/// Channel output before the noise is summed in.
#[derive(Debug, Clone)]
pub struct ChannelOutput<T> {
    /// Faded / filtered signal.
    pub faded: ComplexSeries<T>,
    pub noise: Vec<Complex<T>>,
    /// Block fading gain, when the model draws one.
    pub gain: Option<Complex<f64>>,
}

impl<T: Real> ChannelOutput<T> {
    pub fn received(&self) -> ComplexSeries<T> {
        ComplexSeries::from_parts_unchecked(
            self.faded
                .samples()
                .iter()
                .zip(&self.noise)
                .map(|(s, n)| s + n)
                .collect(),
            self.faded.sample_rate(),
        )
    }
}

pub fn apply_channel<T: Real>(x: &ComplexSeries<T>, channel: &Channel, rng_seed: u64) -> Result<ComplexSeries<T>> {
    Ok(apply_channel_parts(x, channel, rng_seed)?.received())
}

/// Same draws as [`apply_channel`], with signal and noise kept apart.
pub fn apply_channel_parts<T: Real>(
    x: &ComplexSeries<T>,
    channel: &Channel,
    rng_seed: u64,
) -> Result<ChannelOutput<T>> {
    channel.model.validate()?;
    if !channel.snr_db.is_finite() {
        return Err(Error::invalid(format!("SNR must be finite, got {}", channel.snr_db)));
    }
    let mut rng = seeded(rng_seed);
    let (faded, gain) = match &channel.model {
        ChannelModel::Gaussian => (x.clone(), None),
        ChannelModel::RayleighBlock { sigma } => {
            let g = rayleigh_gain(*sigma, &mut rng);
            let gt = Complex::new(T::lit(g.re), T::lit(g.im));
            let faded = x.samples().iter().map(|s| s * gt).collect();
            (ComplexSeries::from_parts_unchecked(faded, x.sample_rate()), Some(g))
        }
        ChannelModel::FreqSelective { tap_delays, tap_gains } => {
            let src = x.samples();
            let mut out = vec![Complex::new(T::zero(), T::zero()); src.len()];
            for (&d, &g) in tap_delays.iter().zip(tap_gains) {
                let g = T::lit(g);
                for (o, s) in out.iter_mut().skip(d).zip(src) {
                    *o = *o + s * g;
                }
            }
            (ComplexSeries::from_parts_unchecked(out, x.sample_rate()), None)
        }
    };
    let noise_var = measure_power(&faded).to_f64_lossy() * 10f64.powf(-channel.snr_db / 10.0);
    let noise = complex_awgn(faded.len(), noise_var, &mut rng);
    Ok(ChannelOutput { faded, noise, gain })
}

/// Circular complex Gaussian with per-sample variance `variance`, split
/// equally between real and imaginary parts.
fn complex_awgn<T: Real>(len: usize, variance: f64, rng: &mut SeededRng) -> Vec<Complex<T>> {
    let std = (variance / 2.0).sqrt();
    (0..len)
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Complex::new(T::lit(std * re), T::lit(std * im))
        })
        .collect()
}

/// `σ(N₁ + jN₂)`: Rayleigh(σ) magnitude, uniform phase.
fn rayleigh_gain(sigma: f64, rng: &mut SeededRng) -> Complex<f64> {
    let normal = Normal::new(0.0, sigma).expect("sigma validated");
    Complex::new(normal.sample(rng), normal.sample(rng))
}
