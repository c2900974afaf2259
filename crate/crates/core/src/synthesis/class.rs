use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Signal class tag. The first nine are the closed set used for training;
/// the two novel FM variants are only ever used as unseen test inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignalClass {
    Fh,
    Bpsk,
    TrackingJamming,
    Sweeping,
    NoiseFm,
    Pulse,
    SingleTone,
    MultiTone,
    CombSpectrum,
    NovelPowerLawFm,
    NovelParabolicFm,
}

impl SignalClass {
    pub const ALL: [SignalClass; 11] = [
        SignalClass::Fh,
        SignalClass::Bpsk,
        SignalClass::TrackingJamming,
        SignalClass::Sweeping,
        SignalClass::NoiseFm,
        SignalClass::Pulse,
        SignalClass::SingleTone,
        SignalClass::MultiTone,
        SignalClass::CombSpectrum,
        SignalClass::NovelPowerLawFm,
        SignalClass::NovelParabolicFm,
    ];

    /// Closed-set classes in label order (alphabetical by slug).
    pub const CLOSED_SET: [SignalClass; 9] = [
        SignalClass::Bpsk,
        SignalClass::CombSpectrum,
        SignalClass::Fh,
        SignalClass::MultiTone,
        SignalClass::NoiseFm,
        SignalClass::Pulse,
        SignalClass::SingleTone,
        SignalClass::Sweeping,
        SignalClass::TrackingJamming,
    ];

    pub const NOVEL: [SignalClass; 2] = [SignalClass::NovelPowerLawFm, SignalClass::NovelParabolicFm];

    pub fn slug(self) -> &'static str {
        match self {
            SignalClass::Fh => "fh",
            SignalClass::Bpsk => "bpsk",
            SignalClass::TrackingJamming => "tracking-jamming",
            SignalClass::Sweeping => "sweeping",
            SignalClass::NoiseFm => "noise-fm",
            SignalClass::Pulse => "pulse",
            SignalClass::SingleTone => "single-tone",
            SignalClass::MultiTone => "multi-tone",
            SignalClass::CombSpectrum => "comb-spectrum",
            SignalClass::NovelPowerLawFm => "novel-power-law-fm",
            SignalClass::NovelParabolicFm => "novel-parabolic-fm",
        }
    }

    pub fn is_novel(self) -> bool {
        matches!(self, SignalClass::NovelPowerLawFm | SignalClass::NovelParabolicFm)
    }

    /// Normal signals carry no interference; everything else is host + jammer.
    pub fn is_normal(self) -> bool {
        matches!(self, SignalClass::Fh | SignalClass::Bpsk)
    }

    /// Training label, `None` for the novel classes.
    pub fn label_index(self) -> Option<usize> {
        Self::CLOSED_SET.iter().position(|&c| c == self)
    }

    pub fn from_label_index(index: usize) -> Option<SignalClass> {
        Self::CLOSED_SET.get(index).copied()
    }
}

impl fmt::Display for SignalClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.slug())
    }
}

impl FromStr for SignalClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let wanted = s.trim().to_ascii_lowercase().replace('_', "-");
        let alias = match wanted.as_str() {
            "tracking" => "tracking-jamming",
            "sweep" => "sweeping",
            "comb" => "comb-spectrum",
            other => other,
        };
        Self::ALL
            .iter()
            .copied()
            .find(|c| c.slug() == alias)
            .ok_or_else(|| Error::invalid(format!("unknown signal class '{s}'")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_set_is_alphabetical_and_excludes_novel() {
        let slugs: Vec<_> = SignalClass::CLOSED_SET.iter().map(|c| c.slug()).collect();
        let mut sorted = slugs.clone();
        sorted.sort_unstable();
        assert_eq!(slugs, sorted);
        for c in SignalClass::NOVEL {
            assert_eq!(c.label_index(), None);
        }
        for (i, c) in SignalClass::CLOSED_SET.iter().enumerate() {
            assert_eq!(c.label_index(), Some(i));
            assert_eq!(SignalClass::from_label_index(i), Some(*c));
        }
    }

    #[test]
    fn parses_slugs_and_aliases() {
        for c in SignalClass::ALL {
            assert_eq!(c.slug().parse::<SignalClass>().unwrap(), c);
        }
        assert_eq!("SINGLE_TONE".parse::<SignalClass>().unwrap(), SignalClass::SingleTone);
        assert_eq!("comb".parse::<SignalClass>().unwrap(), SignalClass::CombSpectrum);
        assert!("qpsk".parse::<SignalClass>().is_err());
    }
}
