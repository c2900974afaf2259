//! Unseen FM signals used to probe open-set behaviour.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::normal::{check_rate, real_series};
use crate::error::{Error, Result};
use crate::rng::seeded;
use crate::scalar::Real;
use crate::series::ComplexSeries;

pub const POWER_LAW_EXPONENT_RANGE: (f64, f64) = (0.15, 0.5);
pub const PARABOLA_ORDINATE_RANGE: (f64, f64) = (0.1, 0.45);
/// Power-law sweeps end at this fraction of Nyquist.
pub const POWER_LAW_SPAN: f64 = 0.9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum NovelFmKind {
    PowerLaw {
        exponent: f64,
    },
    /// Instantaneous frequency (fraction of Nyquist) at the start, middle and
    /// end of the frame.
    Parabolic {
        control_ordinates: [f64; 3],
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NovelFmSpec {
    #[serde(flatten)]
    pub kind: NovelFmKind,
    pub amplitude: f64,
    pub sample_rate: f64,
    pub n_samples: usize,
}

impl NovelFmSpec {
    pub fn validate(&self) -> Result<()> {
        check_rate(self.sample_rate)?;
        if self.n_samples < 2 {
            return Err(Error::invalid("novel FM needs at least 2 samples"));
        }
        if self.amplitude.is_nan() || self.amplitude <= 0.0 {
            return Err(Error::invalid("novel FM amplitude must be > 0"));
        }
        let within = |v: f64, (lo, hi): (f64, f64)| (lo..=hi).contains(&v);
        match &self.kind {
            NovelFmKind::PowerLaw { exponent } if !within(*exponent, POWER_LAW_EXPONENT_RANGE) => Err(Error::invalid(
                format!("power-law exponent {exponent} outside [0.15, 0.5]"),
            )),
            NovelFmKind::Parabolic { control_ordinates }
                if !control_ordinates.iter().all(|&c| within(c, PARABOLA_ORDINATE_RANGE)) =>
            {
                Err(Error::invalid(format!(
                    "parabola ordinates {control_ordinates:?} outside [0.1, 0.45]"
                )))
            }
            _ => Ok(()),
        }
    }

    /// Instantaneous frequency in Hz at sample `n`.
    pub fn instantaneous_freq(&self, n: usize) -> f64 {
        let nyquist = self.sample_rate / 2.0;
        let u = n as f64 / (self.n_samples - 1) as f64;
        match &self.kind {
            NovelFmKind::PowerLaw { exponent } => POWER_LAW_SPAN * nyquist * u.powf(*exponent),
            NovelFmKind::Parabolic {
                control_ordinates: [c0, c1, c2],
            } => {
                // Lagrange basis on nodes u = 0, 1/2, 1.
                let l0 = 2.0 * (u - 0.5) * (u - 1.0);
                let l1 = -4.0 * u * (u - 1.0);
                let l2 = 2.0 * u * (u - 0.5);
                nyquist * (c0 * l0 + c1 * l1 + c2 * l2)
            }
        }
    }
}

/// Phase is the running sum of the instantaneous frequency, starting from a
/// seeded random phase.
pub fn gen_novel<T: Real>(spec: &NovelFmSpec, rng_seed: u64) -> Result<ComplexSeries<T>> {
    spec.validate()?;
    let mut phase = seeded(rng_seed).random_range(0.0..2.0 * PI);
    let step = 2.0 * PI / spec.sample_rate;
    let values: Vec<f64> = (0..spec.n_samples)
        .map(|n| {
            let v = spec.amplitude * phase.cos();
            phase += step * spec.instantaneous_freq(n);
            v
        })
        .collect();
    Ok(real_series(values.into_iter(), spec.sample_rate))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(kind: NovelFmKind) -> NovelFmSpec {
        NovelFmSpec {
            kind,
            amplitude: 1.0,
            sample_rate: 2.0e6,
            n_samples: 600,
        }
    }

    #[test]
    fn exponent_range_is_inclusive() {
        assert!(spec(NovelFmKind::PowerLaw { exponent: 0.15 }).validate().is_ok());
        assert!(spec(NovelFmKind::PowerLaw { exponent: 0.5 }).validate().is_ok());
        assert!(spec(NovelFmKind::PowerLaw { exponent: 0.14 }).validate().is_err());
        assert!(gen_novel::<f64>(&spec(NovelFmKind::PowerLaw { exponent: 0.51 }), 0).is_err());
    }

    #[test]
    fn ordinates_outside_range_rejected() {
        let bad = NovelFmKind::Parabolic {
            control_ordinates: [0.1, 0.46, 0.2],
        };
        assert!(spec(bad).validate().is_err());
    }

    #[test]
    fn equal_ordinates_give_constant_tone() {
        let s = spec(NovelFmKind::Parabolic {
            control_ordinates: [0.3; 3],
        });
        for n in [0, 150, 299, 450, 599] {
            assert!((s.instantaneous_freq(n) - 0.3 * 1.0e6).abs() < 1e-6);
        }
        let x = gen_novel::<f64>(&s, 4).unwrap().real_part();
        let phi0 = seeded(4).random_range(0.0..2.0 * PI);
        let delta = 2.0 * PI * 0.3e6 / 2.0e6;
        for (n, v) in x.iter().enumerate() {
            assert!((v - (phi0 + delta * n as f64).cos()).abs() < 1e-9, "n={n}");
        }
    }

    #[test]
    fn parabola_passes_through_control_points() {
        let s = spec(NovelFmKind::Parabolic {
            control_ordinates: [0.1, 0.4, 0.2],
        });
        let f = |n| s.instantaneous_freq(n) / 1.0e6;
        assert!((f(0) - 0.1).abs() < 1e-12);
        assert!((f(599) - 0.2).abs() < 1e-12);
        // Vertex region: the midpoint sits between samples 299 and 300.
        assert!(f(299) > 0.39 && f(300) > 0.39);
    }

    #[test]
    fn power_law_is_monotone_and_spans_band() {
        let s = spec(NovelFmKind::PowerLaw { exponent: 0.3 });
        assert_eq!(s.instantaneous_freq(0), 0.0);
        assert!((s.instantaneous_freq(599) - 0.9e6).abs() < 1e-6);
        for n in 1..600 {
            assert!(s.instantaneous_freq(n) > s.instantaneous_freq(n - 1));
        }
    }
}
