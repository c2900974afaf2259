use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::channel::ChannelModel;
use crate::error::{Error, Result};
use crate::synthesis::{SignalClass, SynthesisProfile};
use crate::tfa::{TfMethod, WindowConfig, DEFAULT_FREQ_BINS, DEFAULT_IMAGE_SIZE};

pub const SNR_GRID_DB: [f64; 5] = [-6.0, -2.0, 2.0, 6.0, 10.0];
pub const JSR_GRID_DB: [f64; 4] = [-5.0, 0.0, 5.0, 10.0];
pub const FIXED_JSR_DB: f64 = 5.0;
pub const FIXED_SNR_DB: f64 = -2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Test,
}

impl Split {
    pub fn tag(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Test => "test",
        }
    }
}

/// One dataset sweep: which classes, which SNR/JSR cells, how many samples
/// per cell and split, and how each sample becomes an image.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub classes: Vec<SignalClass>,
    pub snr_grid_db: Vec<f64>,
    pub jsr_grid_db: Vec<f64>,
    pub channel: ChannelModel,
    pub train_per_cell: usize,
    pub test_per_cell: usize,
    pub master_seed: u64,
    /// (height, width)
    pub image_size: (usize, usize),
    pub tf_method: TfMethod,
    pub windows: WindowConfig,
    pub n_freq_bins: usize,
    pub profile: SynthesisProfile,
}

impl Default for SweepConfig {
    /// Desk-scale SNR sweep: 20 train and 10 test per class per SNR.
    fn default() -> Self {
        Self {
            classes: SignalClass::CLOSED_SET.to_vec(),
            snr_grid_db: SNR_GRID_DB.to_vec(),
            jsr_grid_db: vec![FIXED_JSR_DB],
            channel: ChannelModel::Gaussian,
            train_per_cell: 20,
            test_per_cell: 10,
            master_seed: 0,
            image_size: (DEFAULT_IMAGE_SIZE, DEFAULT_IMAGE_SIZE),
            tf_method: TfMethod::Spwvd,
            windows: WindowConfig::default(),
            n_freq_bins: DEFAULT_FREQ_BINS,
            profile: SynthesisProfile::default(),
        }
    }
}

impl SweepConfig {
    /// 2000 train and 500 test per class per SNR.
    pub fn paper_scale() -> Self {
        Self {
            train_per_cell: 2000,
            test_per_cell: 500,
            ..Self::default()
        }
    }

    /// JSR sweep at a fixed SNR.
    pub fn jsr_sweep() -> Self {
        Self {
            snr_grid_db: vec![FIXED_SNR_DB],
            jsr_grid_db: JSR_GRID_DB.to_vec(),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.classes.is_empty() {
            return Err(Error::Empty("class list"));
        }
        let unique: HashSet<_> = self.classes.iter().collect();
        if unique.len() != self.classes.len() {
            return Err(Error::invalid("class list contains duplicates"));
        }
        if self.snr_grid_db.is_empty() {
            return Err(Error::Empty("SNR grid"));
        }
        if self.jsr_grid_db.is_empty() {
            return Err(Error::Empty("JSR grid"));
        }
        if self.snr_grid_db.iter().chain(&self.jsr_grid_db).any(|v| !v.is_finite()) {
            return Err(Error::invalid("grid values must be finite"));
        }
        if self.snr_grid_db.len() > 1 && self.jsr_grid_db.len() > 1 {
            return Err(Error::invalid(
                "only one of the SNR and JSR grids may have more than one value",
            ));
        }
        for grid in [&self.snr_grid_db, &self.jsr_grid_db] {
            let distinct: HashSet<u64> = grid.iter().map(|v| v.to_bits()).collect();
            if distinct.len() != grid.len() {
                return Err(Error::invalid("grid values must be distinct"));
            }
        }
        if self.train_per_cell == 0 && self.test_per_cell == 0 {
            return Err(Error::invalid(
                "at least one of train_per_cell and test_per_cell must be positive",
            ));
        }
        if self.image_size.0 == 0 || self.image_size.1 == 0 {
            return Err(Error::invalid("image size must be positive"));
        }
        if self.n_freq_bins < 2 {
            return Err(Error::invalid("n_freq_bins must be >= 2"));
        }
        self.channel.validate()?;
        self.windows.to_spec()?;
        self.profile.validate()
    }

    /// Grid cells as (snr, jsr) pairs.
    pub fn cells(&self) -> Vec<(f64, f64)> {
        self.snr_grid_db
            .iter()
            .flat_map(|&s| self.jsr_grid_db.iter().map(move |&j| (s, j)))
            .collect()
    }

    pub fn count(&self, split: Split) -> usize {
        let per_cell = match split {
            Split::Train => self.train_per_cell,
            Split::Test => self.test_per_cell,
        };
        per_cell * self.cells().len() * self.classes.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn desk_counts() {
        let cfg = SweepConfig::default();
        cfg.validate().unwrap();
        assert_eq!(cfg.count(Split::Train), 900);
        assert_eq!(cfg.count(Split::Test), 450);
        let paper = SweepConfig::paper_scale();
        assert_eq!(paper.count(Split::Train), 90_000);
        assert_eq!(paper.count(Split::Test), 22_500);
    }

    #[test]
    fn invalid_configs_rejected() {
        let mut c = SweepConfig::default();
        c.classes.clear();
        assert!(c.validate().is_err());
        let mut c = SweepConfig::default();
        c.jsr_grid_db = vec![0.0, 5.0];
        assert!(c.validate().is_err());
        assert!(SweepConfig::jsr_sweep().validate().is_ok());
        let mut c = SweepConfig::default();
        c.train_per_cell = 0;
        c.test_per_cell = 0;
        assert!(c.validate().is_err());
        let mut c = SweepConfig::default();
        c.windows.time_len = Some(32);
        assert!(c.validate().is_err());
    }

    #[test]
    fn json_round_trip() {
        let cfg = SweepConfig::jsr_sweep();
        let s = serde_json::to_string(&cfg).unwrap();
        assert_eq!(serde_json::from_str::<SweepConfig>(&s).unwrap(), cfg);
    }
}
