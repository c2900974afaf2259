//! Complete per-sample signal descriptions and their random draws.
//!
//! Table-style parameter ranges that exceed Nyquist at the common frame rate
//! are clamped into `band` (fractions of the sample rate); the clamp travels
//! with the [`SynthesisProfile`] so datasets record it.

use std::f64::consts::TAU;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::class::SignalClass;
use super::jammer::{gen_jammer, JammerSpec};
use super::mix::mix_at_jsr;
use super::normal::{gen_bpsk, gen_fh, BpskSpec, FhSpec, HOPS};
use super::novel::{gen_novel, NovelFmKind, NovelFmSpec, PARABOLA_ORDINATE_RANGE, POWER_LAW_EXPONENT_RANGE};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, SeededRng};
use crate::scalar::Real;
use crate::series::ComplexSeries;

pub const FRAME_LEN: usize = 600;
pub const SAMPLES_PER_HOP: usize = 100;
pub const DEFAULT_SAMPLE_RATE: f64 = 2.0e6;
pub const BPSK_SYMBOL_RATE: f64 = 100.0;
pub const MULTI_TONE_COUNT: usize = 7;
pub const COMB_TEETH: usize = 4;
pub const PULSE_WIDTH: usize = 20;
pub const PULSE_PERIOD: usize = 120;
pub const PULSE_COUNT: usize = 4;
/// Reference noise-FM settings, defined at 60 MHz and rescaled to the frame rate.
pub const NOISE_FM_REFERENCE_RATE: f64 = 60.0e6;
pub const NOISE_FM_REFERENCE_KFM: f64 = 50_000.0;
pub const NOISE_FM_VARIANCE: f64 = 1.0;

/// Frame geometry and the frequency clamp applied to random draws.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthesisProfile {
    pub sample_rate: f64,
    pub frame_len: usize,
    /// Random frequencies are drawn from `band.0·fs .. band.1·fs`.
    pub band: (f64, f64),
}

impl Default for SynthesisProfile {
    fn default() -> Self {
        Self {
            sample_rate: DEFAULT_SAMPLE_RATE,
            frame_len: FRAME_LEN,
            band: (0.05, 0.45),
        }
    }
}

impl SynthesisProfile {
    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.band;
        if !(0.0 < lo && lo < hi && hi < 0.5) {
            return Err(Error::invalid(format!(
                "band {:?} must satisfy 0 < lo < hi < 0.5",
                self.band
            )));
        }
        if self.frame_len != HOPS * SAMPLES_PER_HOP {
            return Err(Error::invalid(format!(
                "frame length must be {} (6 hops of {SAMPLES_PER_HOP})",
                HOPS * SAMPLES_PER_HOP
            )));
        }
        super::normal::check_rate(self.sample_rate)
    }

    pub fn duration(&self) -> f64 {
        self.frame_len as f64 / self.sample_rate
    }

    fn freq(&self, rng: &mut SeededRng) -> f64 {
        self.sample_rate * rng.random_range(self.band.0..self.band.1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum HostSpec {
    Fh(FhSpec),
    Bpsk(BpskSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Interference {
    Jammer(JammerSpec),
    Novel(NovelFmSpec),
}

/// Everything needed to re-synthesize one sample, given its seed and JSR.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalSpec {
    pub class: SignalClass,
    pub host: HostSpec,
    pub interference: Option<Interference>,
}

const HOST_STREAM: u64 = 1;
const INTERFERENCE_STREAM: u64 = 2;

impl SignalSpec {
    /// Draws class-specific random parameters from `rng`.
    pub fn draw(class: SignalClass, profile: &SynthesisProfile, rng: &mut SeededRng) -> Result<Self> {
        profile.validate()?;
        let fs = profile.sample_rate;
        let n = profile.frame_len;
        let fh = |rng: &mut SeededRng| FhSpec {
            hop_freqs: std::array::from_fn(|_| profile.freq(rng)),
            hop_phases: std::array::from_fn(|_| rng.random_range(0.0..TAU)),
            samples_per_hop: SAMPLES_PER_HOP,
            sample_rate: fs,
        };
        let bpsk = |rng: &mut SeededRng| BpskSpec {
            symbol_rate: BPSK_SYMBOL_RATE,
            carrier_freq: profile.freq(rng),
            bit_prob_zero: 0.5,
            n_samples: n,
            sample_rate: fs,
        };

        let (host, interference) = match class {
            SignalClass::Fh => (HostSpec::Fh(fh(rng)), None),
            SignalClass::Bpsk => (HostSpec::Bpsk(bpsk(rng)), None),
            SignalClass::TrackingJamming => {
                let victim = fh(rng);
                // Same frequency plan, independent oscillator phases.
                let base = FhSpec {
                    hop_phases: std::array::from_fn(|_| rng.random_range(0.0..TAU)),
                    ..victim.clone()
                };
                let jammer = JammerSpec::Tracking {
                    amplitudes: [1.0; HOPS],
                    delay_samples: rng.random_range(10..=50),
                    base,
                };
                (HostSpec::Fh(victim), Some(Interference::Jammer(jammer)))
            }
            SignalClass::NovelPowerLawFm | SignalClass::NovelParabolicFm => {
                let host = bpsk(rng);
                let kind = if class == SignalClass::NovelPowerLawFm {
                    let (lo, hi) = POWER_LAW_EXPONENT_RANGE;
                    NovelFmKind::PowerLaw {
                        exponent: rng.random_range(lo..=hi),
                    }
                } else {
                    let (lo, hi) = PARABOLA_ORDINATE_RANGE;
                    NovelFmKind::Parabolic {
                        control_ordinates: std::array::from_fn(|_| rng.random_range(lo..=hi)),
                    }
                };
                let novel = NovelFmSpec {
                    kind,
                    amplitude: 1.0,
                    sample_rate: fs,
                    n_samples: n,
                };
                (HostSpec::Bpsk(host), Some(Interference::Novel(novel)))
            }
            jammed => {
                let host = bpsk(rng);
                let jammer = draw_bpsk_jammer(jammed, profile, rng);
                (HostSpec::Bpsk(host), Some(Interference::Jammer(jammer)))
            }
        };
        Ok(Self {
            class,
            host,
            interference,
        })
    }

    pub fn sample_rate(&self) -> f64 {
        match &self.host {
            HostSpec::Fh(s) => s.sample_rate,
            HostSpec::Bpsk(s) => s.sample_rate,
        }
    }

    pub fn n_samples(&self) -> usize {
        match &self.host {
            HostSpec::Fh(s) => s.n_samples(),
            HostSpec::Bpsk(s) => s.n_samples,
        }
    }

    /// Host alone, or host plus interference scaled to `jsr_db`.
    pub fn synthesize<T: Real>(&self, jsr_db: f64, seed: u64) -> Result<ComplexSeries<T>> {
        match self.components(seed)? {
            (host, None) => Ok(host),
            (host, Some(jammer)) => mix_at_jsr(&host, &jammer, jsr_db),
        }
    }

    /// Unscaled host and interference, drawn exactly as [`Self::synthesize`] draws them.
    pub fn components<T: Real>(&self, seed: u64) -> Result<(ComplexSeries<T>, Option<ComplexSeries<T>>)> {
        let host = match &self.host {
            HostSpec::Fh(s) => gen_fh(s)?,
            HostSpec::Bpsk(s) => gen_bpsk(s, derive_seed(seed, HOST_STREAM))?,
        };
        let interference_seed = derive_seed(seed, INTERFERENCE_STREAM);
        let jammer = match &self.interference {
            None => None,
            Some(Interference::Jammer(j)) => {
                Some(gen_jammer(j, self.n_samples(), self.sample_rate(), interference_seed)?)
            }
            Some(Interference::Novel(v)) => Some(gen_novel(v, interference_seed)?),
        };
        Ok((host, jammer))
    }
}

fn draw_bpsk_jammer(class: SignalClass, profile: &SynthesisProfile, rng: &mut SeededRng) -> JammerSpec {
    let fs = profile.sample_rate;
    match class {
        SignalClass::Sweeping => {
            // Keep the sweep visibly non-stationary: at least 15% of fs of travel.
            let (f0, f1) = loop {
                let a = profile.freq(rng);
                let b = profile.freq(rng);
                if (a - b).abs() >= 0.15 * fs {
                    break (a, b);
                }
            };
            let duration = profile.duration();
            JammerSpec::Sweep {
                amplitude: 1.0,
                start_freq: f0,
                chirp_rate: (f1 - f0) / duration,
                phase: rng.random_range(0.0..TAU),
                duration,
            }
        }
        SignalClass::NoiseFm => JammerSpec::NoiseFm {
            amplitude: 1.0,
            center_freq: profile.freq(rng),
            fm_coeff: NOISE_FM_REFERENCE_KFM * fs / NOISE_FM_REFERENCE_RATE,
            noise_variance: NOISE_FM_VARIANCE,
        },
        SignalClass::Pulse => JammerSpec::Pulse {
            amplitude: 1.0,
            carrier_freq: profile.freq(rng),
            pulse_width: PULSE_WIDTH,
            period: PULSE_PERIOD,
            n_pulses: PULSE_COUNT,
        },
        SignalClass::SingleTone => JammerSpec::SingleTone {
            power: 1.0,
            freq: profile.freq(rng),
            phase: rng.random_range(0.0..TAU),
        },
        SignalClass::MultiTone => JammerSpec::MultiTone {
            total_power: 1.0,
            tone_freqs: (0..MULTI_TONE_COUNT).map(|_| profile.freq(rng)).collect(),
            phases: (0..MULTI_TONE_COUNT).map(|_| rng.random_range(0.0..TAU)).collect(),
        },
        SignalClass::CombSpectrum => {
            let lo = rng.random_range(200e3..250e3);
            let hi = rng.random_range(450e3..500e3);
            let step = (hi - lo) / (COMB_TEETH - 1) as f64;
            JammerSpec::Comb {
                tooth_powers: vec![1.0; COMB_TEETH],
                tooth_centers: (0..COMB_TEETH).map(|k| lo + step * k as f64).collect(),
                half_bandwidth: rng.random_range(10e3..=25e3),
                alpha: rng.random_range(0.0..=0.5),
                beta: rng.random_range(180.0..=220.0),
            }
        }
        other => unreachable!("{other} is not a BPSK-hosted jammer"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use crate::series::measure_power;
    use crate::synthesis::jsr_scale;

    #[test]
    fn every_class_draws_valid_specs() {
        let profile = SynthesisProfile::default();
        for class in SignalClass::ALL {
            for seed in 0..20 {
                let spec = SignalSpec::draw(class, &profile, &mut seeded(seed)).unwrap();
                assert_eq!(spec.class, class);
                let x = spec.synthesize::<f64>(5.0, seed).unwrap();
                assert_eq!(x.len(), FRAME_LEN);
                assert!(x.is_real());
                assert_eq!(spec.interference.is_none(), class.is_normal());
            }
        }
    }

    #[test]
    fn draws_respect_the_band_clamp() {
        let profile = SynthesisProfile::default();
        let (lo, hi) = (0.05 * 2e6, 0.45 * 2e6);
        for seed in 0..50 {
            let spec = SignalSpec::draw(SignalClass::MultiTone, &profile, &mut seeded(seed)).unwrap();
            let Some(Interference::Jammer(JammerSpec::MultiTone { tone_freqs, .. })) = spec.interference else {
                panic!("wrong variant");
            };
            assert_eq!(tone_freqs.len(), MULTI_TONE_COUNT);
            assert!(tone_freqs.iter().all(|f| (lo..hi).contains(f)));
        }
    }

    #[test]
    fn synthesis_is_bit_identical_per_seed() {
        let profile = SynthesisProfile::default();
        for class in SignalClass::ALL {
            let a = SignalSpec::draw(class, &profile, &mut seeded(77)).unwrap();
            let b = SignalSpec::draw(class, &profile, &mut seeded(77)).unwrap();
            assert_eq!(a, b);
            assert_eq!(
                a.synthesize::<f64>(0.0, 77).unwrap(),
                b.synthesize::<f64>(0.0, 77).unwrap()
            );
        }
    }

    #[test]
    fn mixture_hits_requested_jsr() {
        let profile = SynthesisProfile::default();
        for (i, jsr) in [-5.0, 0.0, 5.0, 10.0].into_iter().enumerate() {
            let spec = SignalSpec::draw(SignalClass::Sweeping, &profile, &mut seeded(i as u64)).unwrap();
            let host = match &spec.host {
                HostSpec::Bpsk(b) => gen_bpsk::<f64>(b, derive_seed(9, HOST_STREAM)).unwrap(),
                _ => unreachable!(),
            };
            let Some(Interference::Jammer(j)) = &spec.interference else {
                unreachable!()
            };
            let jam = gen_jammer::<f64>(j, FRAME_LEN, 2e6, derive_seed(9, INTERFERENCE_STREAM)).unwrap();
            let scaled = jam.scaled(jsr_scale(&host, &jam, jsr).unwrap());
            let got = 10.0 * (measure_power(&scaled) / measure_power(&host)).log10();
            assert!((got - jsr).abs() < 0.01);
        }
    }
}
