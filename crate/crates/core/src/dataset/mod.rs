//! Seeded spectrogram corpora over SNR/JSR grids, persisted with a manifest
//! that is enough to regenerate every image bit for bit.

mod config;
mod generate;
mod load;
mod seed;

pub use config::{Split, SweepConfig, FIXED_JSR_DB, FIXED_SNR_DB, JSR_GRID_DB, SNR_GRID_DB};
pub use generate::{
    clean_signal, encode_png, generate_dataset, plan_samples, received_signal, render_sample, DatasetManifest,
    SamplePlan, SampleRecord, IMAGE_DIR, MANIFEST_FILE, PARTIAL_MARKER, SCHEMA_VERSION,
};
pub use load::{load_dataset, read_manifest, Dataset, Sample};
pub use seed::{child_seed, sha256_hex};
