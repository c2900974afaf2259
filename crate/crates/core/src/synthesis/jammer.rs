//! The seven jamming waveforms. All are synthesized as real sequences; the
//! absolute amplitude is irrelevant once [`mix_at_jsr`](super::mix_at_jsr)
//! rescales the jammer against its host.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::normal::{check_finite, check_freq, check_rate, real_series, FhSpec, HOPS};
use crate::error::{Error, Result};
use crate::rng::seeded;
use crate::scalar::Real;
use crate::series::ComplexSeries;

/// Comb-tooth modulation time base: `β` is read in rad/ms.
const COMB_BETA_TIME_SCALE: f64 = 1e3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum JammerSpec {
    /// Replays the FH plan, each hop switched on `delay_samples` late.
    Tracking {
        amplitudes: [f64; HOPS],
        delay_samples: usize,
        base: FhSpec,
    },
    /// Linear chirp `A cos(2π f0 t + π k t² + φ)` over `0 ≤ t ≤ duration`.
    Sweep {
        amplitude: f64,
        start_freq: f64,
        chirp_rate: f64,
        phase: f64,
        duration: f64,
    },
    /// Carrier whose phase is a Wiener process scaled by `2π K_FM`.
    NoiseFm {
        amplitude: f64,
        center_freq: f64,
        fm_coeff: f64,
        noise_variance: f64,
    },
    /// `n_pulses` carrier bursts, one per period slot, each at a random
    /// offset inside its slot.
    Pulse {
        amplitude: f64,
        carrier_freq: f64,
        pulse_width: usize,
        period: usize,
        n_pulses: usize,
    },
    SingleTone {
        power: f64,
        freq: f64,
        phase: f64,
    },
    /// Equal-power tones sharing `total_power`.
    MultiTone {
        total_power: f64,
        tone_freqs: Vec<f64>,
        phases: Vec<f64>,
    },
    /// Sinusoidally frequency-modulated teeth. Each tooth's instantaneous
    /// frequency is `f_k + 2αΔf cos(βπ t)` with `t` in ms, so for `α ≤ 0.5`
    /// the tooth stays inside `[f_k - Δf, f_k + Δf]`.
    Comb {
        tooth_powers: Vec<f64>,
        tooth_centers: Vec<f64>,
        half_bandwidth: f64,
        alpha: f64,
        beta: f64,
    },
}

impl JammerSpec {
    pub fn validate(&self, n_samples: usize, sample_rate: f64) -> Result<()> {
        check_rate(sample_rate)?;
        if n_samples == 0 {
            return Err(Error::invalid("n_samples must be >= 1"));
        }
        match self {
            JammerSpec::Tracking {
                amplitudes,
                delay_samples,
                base,
            } => {
                base.validate()?;
                positive("tracking amplitude", amplitudes)?;
                if *delay_samples >= base.samples_per_hop {
                    return Err(Error::invalid(format!(
                        "tracking delay {delay_samples} must be < samples_per_hop {}",
                        base.samples_per_hop
                    )));
                }
                if base.n_samples() != n_samples || base.sample_rate != sample_rate {
                    return Err(Error::invalid(
                        "tracking base plan must match the frame length and sample rate",
                    ));
                }
            }
            JammerSpec::Sweep {
                amplitude,
                start_freq,
                chirp_rate,
                phase,
                duration,
            } => {
                positive("sweep amplitude", &[*amplitude, *duration])?;
                check_finite("sweep parameter", &[*chirp_rate, *phase])?;
                check_freq(*start_freq, sample_rate)?;
                check_freq(start_freq + chirp_rate * duration, sample_rate)?;
            }
            JammerSpec::NoiseFm {
                amplitude,
                center_freq,
                fm_coeff,
                noise_variance,
            } => {
                positive("noise-fm amplitude", &[*amplitude])?;
                check_freq(*center_freq, sample_rate)?;
                if !(*fm_coeff >= 0.0 && *noise_variance >= 0.0) {
                    return Err(Error::invalid("noise-fm K_FM and variance must be >= 0"));
                }
            }
            JammerSpec::Pulse {
                amplitude,
                carrier_freq,
                pulse_width,
                period,
                n_pulses,
            } => {
                positive("pulse amplitude", &[*amplitude])?;
                check_freq(*carrier_freq, sample_rate)?;
                if *pulse_width == 0 || pulse_width > period || *n_pulses == 0 {
                    return Err(Error::invalid("pulse needs 1 <= width <= period and >= 1 pulse"));
                }
                if n_pulses * period > n_samples {
                    return Err(Error::invalid(format!(
                        "{n_pulses} pulses of period {period} do not fit in {n_samples} samples"
                    )));
                }
            }
            JammerSpec::SingleTone { power, freq, phase } => {
                positive("tone power", &[*power])?;
                check_freq(*freq, sample_rate)?;
                check_finite("tone phase", &[*phase])?;
            }
            JammerSpec::MultiTone {
                total_power,
                tone_freqs,
                phases,
            } => {
                positive("multi-tone power", &[*total_power])?;
                if tone_freqs.is_empty() || tone_freqs.len() != phases.len() {
                    return Err(Error::invalid("multi-tone needs matching, non-empty freqs and phases"));
                }
                for &f in tone_freqs {
                    check_freq(f, sample_rate)?;
                }
                check_finite("tone phase", phases)?;
            }
            JammerSpec::Comb {
                tooth_powers,
                tooth_centers,
                half_bandwidth,
                alpha,
                beta,
            } => {
                if tooth_centers.is_empty() || tooth_centers.len() != tooth_powers.len() {
                    return Err(Error::invalid("comb needs matching, non-empty powers and centers"));
                }
                positive("comb tooth power", tooth_powers)?;
                positive("comb modulation", &[*half_bandwidth, *beta])?;
                if !(0.0..=0.5).contains(alpha) {
                    return Err(Error::invalid(format!("comb alpha must lie in [0, 0.5], got {alpha}")));
                }
                for &fk in tooth_centers {
                    check_freq(fk - half_bandwidth, sample_rate)?;
                    check_freq(fk + half_bandwidth, sample_rate)?;
                }
            }
        }
        Ok(())
    }
}

fn positive(what: &str, values: &[f64]) -> Result<()> {
    match values.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
        Some(v) => Err(Error::invalid(format!("{what} must be > 0, got {v}"))),
        None => Ok(()),
    }
}

/// Wiener phase of the noise-FM jammer: `φ[0] = 0`,
/// `φ[n+1] = φ[n] + 2π K_FM w_n` with `w_n ~ N(0, σ² T_s)`.
pub fn noise_fm_phase(
    fm_coeff: f64,
    noise_variance: f64,
    n_samples: usize,
    sample_rate: f64,
    rng_seed: u64,
) -> Vec<f64> {
    let std = (noise_variance / sample_rate).sqrt();
    let increments = Normal::new(0.0, std).expect("std is finite and >= 0");
    let mut rng = seeded(rng_seed);
    let mut phase = Vec::with_capacity(n_samples);
    let mut acc = 0.0;
    for _ in 0..n_samples {
        phase.push(acc);
        acc += 2.0 * PI * fm_coeff * increments.sample(&mut rng);
    }
    phase
}

/// Burst start indices: pulse `i` starts uniformly inside
/// `[i·period, i·period + period - width]`.
pub fn pulse_onsets(pulse_width: usize, period: usize, n_pulses: usize, rng_seed: u64) -> Vec<usize> {
    let mut rng = seeded(rng_seed);
    (0..n_pulses)
        .map(|i| i * period + rng.random_range(0..=period - pulse_width))
        .collect()
}

pub fn gen_jammer<T: Real>(
    spec: &JammerSpec,
    n_samples: usize,
    sample_rate: f64,
    rng_seed: u64,
) -> Result<ComplexSeries<T>> {
    spec.validate(n_samples, sample_rate)?;
    let ts = 1.0 / sample_rate;
    let time = |n: usize| n as f64 * ts;
    let values: Vec<f64> = match spec {
        JammerSpec::Tracking {
            amplitudes,
            delay_samples,
            base,
        } => (0..n_samples)
            .map(|n| {
                let j = base.hop_of(n);
                if n % base.samples_per_hop < *delay_samples {
                    0.0
                } else {
                    amplitudes[j] * (2.0 * PI * base.hop_freqs[j] * time(n) + base.hop_phases[j]).cos()
                }
            })
            .collect(),
        JammerSpec::Sweep {
            amplitude,
            start_freq,
            chirp_rate,
            phase,
            duration,
        } => (0..n_samples)
            .map(|n| {
                let t = time(n);
                if t > *duration {
                    0.0
                } else {
                    amplitude * (2.0 * PI * start_freq * t + PI * chirp_rate * t * t + phase).cos()
                }
            })
            .collect(),
        JammerSpec::NoiseFm {
            amplitude,
            center_freq,
            fm_coeff,
            noise_variance,
        } => noise_fm_phase(*fm_coeff, *noise_variance, n_samples, sample_rate, rng_seed)
            .into_iter()
            .enumerate()
            .map(|(n, phi)| amplitude * (2.0 * PI * center_freq * time(n) + phi).cos())
            .collect(),
        JammerSpec::Pulse {
            amplitude,
            carrier_freq,
            pulse_width,
            period,
            n_pulses,
        } => {
            let onsets = pulse_onsets(*pulse_width, *period, *n_pulses, rng_seed);
            let mut v = vec![0.0; n_samples];
            for &start in &onsets {
                for (n, slot) in v.iter_mut().enumerate().skip(start).take(*pulse_width) {
                    *slot = amplitude * (2.0 * PI * carrier_freq * time(n)).cos();
                }
            }
            v
        }
        JammerSpec::SingleTone { power, freq, phase } => {
            let a = (2.0 * power).sqrt();
            (0..n_samples)
                .map(|n| a * (2.0 * PI * freq * time(n) + phase).cos())
                .collect()
        }
        JammerSpec::MultiTone {
            total_power,
            tone_freqs,
            phases,
        } => {
            let a = (2.0 * total_power / tone_freqs.len() as f64).sqrt();
            (0..n_samples)
                .map(|n| {
                    let t = time(n);
                    tone_freqs
                        .iter()
                        .zip(phases)
                        .map(|(f, p)| a * (2.0 * PI * f * t + p).cos())
                        .sum()
                })
                .collect()
        }
        JammerSpec::Comb {
            tooth_powers,
            tooth_centers,
            half_bandwidth,
            alpha,
            beta,
        } => {
            let omega = beta * PI * COMB_BETA_TIME_SCALE;
            // Peak phase deviation giving a 2αΔf peak frequency deviation.
            let index = 2.0 * alpha * half_bandwidth * 2.0 * PI / omega;
            (0..n_samples)
                .map(|n| {
                    let t = time(n);
                    let wobble = index * (omega * t).sin();
                    tooth_centers
                        .iter()
                        .zip(tooth_powers)
                        .map(|(fk, pk)| (2.0 * pk).sqrt() * (2.0 * PI * fk * t + wobble).cos())
                        .sum()
                })
                .collect()
        }
    };
    Ok(real_series(values.into_iter(), sample_rate))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::measure_power;

    const FS: f64 = 2.0e6;
    const N: usize = 600;

    fn fh_base() -> FhSpec {
        FhSpec {
            hop_freqs: [0.08, 0.35, 0.15, 0.42, 0.22, 0.30].map(|r| r * FS),
            hop_phases: [0.3; HOPS],
            samples_per_hop: 100,
            sample_rate: FS,
        }
    }

    fn dft_peaks(x: &[f64], count: usize) -> Vec<usize> {
        let n = x.len();
        let mag: Vec<f64> = (0..n / 2)
            .map(|k| {
                let (mut re, mut im) = (0.0, 0.0);
                for (i, &v) in x.iter().enumerate() {
                    let a = -2.0 * PI * (k * i) as f64 / n as f64;
                    re += v * a.cos();
                    im += v * a.sin();
                }
                re.hypot(im)
            })
            .collect();
        let mut local: Vec<usize> = (1..mag.len() - 1)
            .filter(|&k| mag[k] > mag[k - 1] && mag[k] >= mag[k + 1])
            .collect();
        local.sort_by(|&a, &b| mag[b].total_cmp(&mag[a]));
        local.truncate(count);
        local.sort_unstable();
        local
    }

    #[test]
    fn single_tone_power_matches_p_j() {
        // 600 samples hold exactly 30 periods of fs/20.
        let spec = JammerSpec::SingleTone {
            power: 0.5,
            freq: FS / 20.0,
            phase: 0.7,
        };
        let s = gen_jammer::<f64>(&spec, N, FS, 0).unwrap();
        assert!((measure_power(&s) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn multi_tone_splits_power_equally() {
        let freqs: Vec<f64> = (1..=7).map(|i| FS * i as f64 * 6.0 / 120.0).collect();
        let spec = JammerSpec::MultiTone {
            total_power: 1.4,
            tone_freqs: freqs,
            phases: vec![0.1; 7],
        };
        let s = gen_jammer::<f64>(&spec, N, FS, 0).unwrap();
        assert!((measure_power(&s) - 1.4).abs() < 1e-9);
    }

    #[test]
    fn comb_with_zero_alpha_is_pure_tones() {
        let centers = vec![60.0, 90.0, 120.0, 150.0]
            .into_iter()
            .map(|k| k * FS / N as f64)
            .collect::<Vec<_>>();
        let spec = JammerSpec::Comb {
            tooth_powers: vec![1.0; 4],
            tooth_centers: centers,
            half_bandwidth: 10e3,
            alpha: 0.0,
            beta: 200.0,
        };
        let s = gen_jammer::<f64>(&spec, N, FS, 0).unwrap().real_part();
        assert_eq!(dft_peaks(&s, 4), vec![60, 90, 120, 150]);
    }

    #[test]
    fn comb_rejects_teeth_crossing_nyquist() {
        let spec = JammerSpec::Comb {
            tooth_powers: vec![1.0],
            tooth_centers: vec![FS / 2.0 - 5e3],
            half_bandwidth: 10e3,
            alpha: 0.2,
            beta: 200.0,
        };
        assert!(matches!(spec.validate(N, FS), Err(Error::Nyquist { .. })));
    }

    #[test]
    fn tracking_onsets_lag_the_hops_by_delay() {
        let m = 23;
        let spec = JammerSpec::Tracking {
            amplitudes: [1.0; HOPS],
            delay_samples: m,
            base: fh_base(),
        };
        let s = gen_jammer::<f64>(&spec, N, FS, 0).unwrap().real_part();
        // Onset train of the jammer vs onset train of the hop plan.
        let active: Vec<bool> = s.iter().map(|v| *v != 0.0).collect();
        let onsets: Vec<f64> = (0..N)
            .map(|n| {
                if active[n] && (n == 0 || !active[n - 1]) {
                    1.0
                } else {
                    0.0
                }
            })
            .collect();
        let hops: Vec<f64> = (0..N).map(|n| if n % 100 == 0 { 1.0 } else { 0.0 }).collect();
        let xcorr = |lag: usize| -> f64 { (0..N - lag).map(|n| hops[n] * onsets[n + lag]).sum() };
        let best = (0..100).max_by(|&a, &b| xcorr(a).total_cmp(&xcorr(b))).unwrap();
        assert_eq!(best, m);
        assert_eq!(xcorr(m), HOPS as f64);
    }

    #[test]
    fn tracking_rejects_delay_beyond_hop() {
        let spec = JammerSpec::Tracking {
            amplitudes: [1.0; HOPS],
            delay_samples: 100,
            base: fh_base(),
        };
        assert!(gen_jammer::<f64>(&spec, N, FS, 0).is_err());
    }

    #[test]
    fn sweep_instantaneous_frequency_is_linear() {
        let (f0, k) = (0.1 * FS, 0.3 * FS / (N as f64 / FS));
        let spec = JammerSpec::Sweep {
            amplitude: 1.0,
            start_freq: f0,
            chirp_rate: k,
            phase: 0.0,
            duration: N as f64 / FS,
        };
        let s = gen_jammer::<f64>(&spec, N, FS, 0).unwrap().real_part();
        for n in [0usize, 100, 377] {
            let t = n as f64 / FS;
            assert!((s[n] - (2.0 * PI * f0 * t + PI * k * t * t).cos()).abs() < 1e-9);
        }
        let bad = JammerSpec::Sweep {
            amplitude: 1.0,
            start_freq: 0.4 * FS,
            chirp_rate: k,
            phase: 0.0,
            duration: N as f64 / FS,
        };
        assert!(bad.validate(N, FS).is_err());
    }

    #[test]
    fn noise_fm_phase_increments_have_wiener_variance() {
        let (k_fm, var) = (50_000.0 * FS / 60.0e6, 1.0);
        let predicted = (2.0 * PI * k_fm).powi(2) * var / FS;
        let phase = noise_fm_phase(k_fm, var, N, FS, 11);
        let inc: Vec<f64> = phase.windows(2).map(|w| w[1] - w[0]).collect();
        let mean = inc.iter().sum::<f64>() / inc.len() as f64;
        let sample_var = inc.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (inc.len() - 1) as f64;
        assert!(
            (sample_var / predicted - 1.0).abs() < 0.2,
            "{sample_var} vs {predicted}"
        );
    }

    #[test]
    fn pulse_bursts_sit_inside_their_slots() {
        let onsets = pulse_onsets(20, 120, 4, 5);
        for (i, &o) in onsets.iter().enumerate() {
            assert!(o >= i * 120 && o + 20 <= (i + 1) * 120);
        }
        let spec = JammerSpec::Pulse {
            amplitude: 1.0,
            carrier_freq: 0.2 * FS,
            pulse_width: 20,
            period: 120,
            n_pulses: 4,
        };
        let s = gen_jammer::<f64>(&spec, N, FS, 5).unwrap().real_part();
        let nonzero = s.iter().filter(|v| **v != 0.0).count();
        assert!(nonzero <= 80 && nonzero >= 76);
        assert!(s[..onsets[0]].iter().all(|v| *v == 0.0));
    }
}
