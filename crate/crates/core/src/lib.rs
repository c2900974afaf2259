//! Jamming-signal recognition from Wigner-Ville family spectrograms.
//!
//! The signal path runs synthesis → JSR mixing → analytic signal → channel →
//! time-frequency distribution → 8-bit image, and the classifiers consume the
//! images. Numeric code is generic over [`Real`] (`f32` or `f64`).

pub mod channel;
pub mod classify;
pub mod dataset;
pub mod error;
pub mod rng;
pub mod scalar;
pub mod series;
pub mod synthesis;
pub mod tfa;

pub use channel::{apply_channel, Channel, ChannelModel};
pub use error::{Error, Result};
pub use scalar::Real;
pub use series::{measure_power, ComplexSeries};

/// Version string embedded in every artifact.
pub const VERSION: &str = concat!("tfjam ", env!("CARGO_PKG_VERSION"));

pub type ComplexSeries32 = ComplexSeries<f32>;
pub type ComplexSeries64 = ComplexSeries<f64>;
pub type TfGrid32 = tfa::TfGrid<f32>;
pub type TfGrid64 = tfa::TfGrid<f64>;
pub type Cnn32 = classify::Cnn<f32>;
pub type Cnn64 = classify::Cnn<f64>;
pub type Knn32 = classify::Knn<f32>;
pub type GaussianNb32 = classify::GaussianNb<f32>;
