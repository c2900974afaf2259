use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_TIME_WINDOW: usize = 33;
pub const DEFAULT_LAG_WINDOW: usize = 129;

/// Symmetric Hamming taper. For odd lengths the centre sample is exactly 1.
pub fn hamming(len: usize) -> Vec<f64> {
    if len == 1 {
        return vec![1.0];
    }
    let denom = (len - 1) as f64;
    (0..len)
        .map(|n| 0.54 - 0.46 * (2.0 * std::f64::consts::PI * n as f64 / denom).cos())
        .collect()
}

/// Odd-length, symmetric, peak-normalized taper.
#[derive(Debug, Clone, PartialEq)]
pub struct Taper(Vec<f64>);

impl Taper {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len().is_multiple_of(2) {
            return Err(Error::invalid(format!("window length {} must be odd", values.len())));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::invalid("window values must be finite and non-negative"));
        }
        let len = values.len();
        if (0..len / 2).any(|i| (values[i] - values[len - 1 - i]).abs() > 1e-12 * values[i].abs().max(1.0)) {
            return Err(Error::invalid("window must be symmetric about its centre"));
        }
        let peak = values.iter().copied().fold(0.0, f64::max);
        if peak <= 0.0 {
            return Err(Error::invalid("window must have a positive peak"));
        }
        Ok(Self(values.into_iter().map(|v| v / peak).collect()))
    }

    pub fn hamming(len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::invalid("window length must be >= 1"));
        }
        Self::new(hamming(len))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn half_len(&self) -> usize {
        self.0.len() / 2
    }

    /// Value at signed offset `k` from the centre.
    pub fn at(&self, k: isize) -> f64 {
        self.0[(self.half_len() as isize + k) as usize]
    }
}

/// Time-smoothing window `g`.
#[derive(Debug, Clone, PartialEq)]
pub enum TimeWindow {
    /// No time smoothing.
    Dirac,
    Taper(Taper),
}

/// Lag window `h`.
#[derive(Debug, Clone, PartialEq)]
pub enum LagWindow {
    /// All ones over every available lag.
    Rectangular,
    Taper(Taper),
}

#[derive(Debug, Clone, PartialEq)]
pub struct WindowSpec {
    pub time: TimeWindow,
    pub lag: LagWindow,
}

impl WindowSpec {
    /// Dirac time window and all-ones lag window: plain WVD.
    pub fn trivial() -> Self {
        Self {
            time: TimeWindow::Dirac,
            lag: LagWindow::Rectangular,
        }
    }

    pub fn hamming(time_len: usize, lag_len: usize) -> Result<Self> {
        Ok(Self {
            time: TimeWindow::Taper(Taper::hamming(time_len)?),
            lag: LagWindow::Taper(Taper::hamming(lag_len)?),
        })
    }
}

impl Default for WindowSpec {
    fn default() -> Self {
        Self::hamming(DEFAULT_TIME_WINDOW, DEFAULT_LAG_WINDOW).expect("default windows are odd")
    }
}

/// Serializable window description (Hamming tapers by length; `None` means
/// Dirac time window / rectangular lag window).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowConfig {
    pub time_len: Option<usize>,
    pub lag_len: Option<usize>,
}

impl Default for WindowConfig {
    fn default() -> Self {
        Self {
            time_len: Some(DEFAULT_TIME_WINDOW),
            lag_len: Some(DEFAULT_LAG_WINDOW),
        }
    }
}

impl WindowConfig {
    pub fn to_spec(&self) -> Result<WindowSpec> {
        Ok(WindowSpec {
            time: match self.time_len {
                None => TimeWindow::Dirac,
                Some(n) => TimeWindow::Taper(Taper::hamming(n)?),
            },
            lag: match self.lag_len {
                None => LagWindow::Rectangular,
                Some(n) => LagWindow::Taper(Taper::hamming(n)?),
            },
        })
    }
}
