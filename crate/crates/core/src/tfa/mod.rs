//! Wigner-Ville family distributions and spectrogram imaging.

mod analytic;
mod dump;
pub(crate) mod image;
mod window;
mod wvd;

pub use self::image::{to_image, to_unit_matrix, DB_FLOOR, DEFAULT_IMAGE_SIZE};
pub use analytic::analytic_signal;
pub use dump::{read_grid, save_grid, write_grid};
pub use window::{
    hamming, LagWindow, Taper, TimeWindow, WindowConfig, WindowSpec, DEFAULT_LAG_WINDOW, DEFAULT_TIME_WINDOW,
};
pub use wvd::{pwvd, spwvd, wvd, TfGrid, TfMethod, DEFAULT_FREQ_BINS};
