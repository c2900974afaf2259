use std::fs;
use std::path::{Path, PathBuf};

use super::config::Split;
use super::generate::{DatasetManifest, SampleRecord};
use super::seed::sha256_hex;
use crate::error::{Error, Result};

/// A decoded sample: pixels scaled to [0, 1], row-major `height×width`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub record: SampleRecord,
    pub pixels: Vec<f32>,
}

#[derive(Debug, Clone)]
pub struct Dataset {
    pub manifest: DatasetManifest,
    pub root: PathBuf,
    pub samples: Vec<Sample>,
}

impl Dataset {
    pub fn image_size(&self) -> (usize, usize) {
        self.manifest.config.image_size
    }

    pub fn split(&self, split: Split) -> Vec<&Sample> {
        self.samples.iter().filter(|s| s.record.split == split).collect()
    }
}

pub fn read_manifest(path: &Path) -> Result<DatasetManifest> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_slice(&bytes)?)
}

/// Loads and verifies every record. A missing file, checksum mismatch or
/// wrong image shape is reported as a corrupt record naming its id.
pub fn load_dataset(manifest_path: &Path) -> Result<Dataset> {
    let manifest = read_manifest(manifest_path)?;
    manifest.check_integrity()?;
    let root = manifest_path.parent().unwrap_or(Path::new(".")).to_path_buf();
    let (h, w) = manifest.config.image_size;
    let mut samples = Vec::with_capacity(manifest.records.len());
    for record in &manifest.records {
        let corrupt = |reason: String| Error::CorruptRecord {
            id: record.id.clone(),
            reason,
        };
        let path = root.join(&record.path);
        let bytes = fs::read(&path).map_err(|e| corrupt(format!("{}: {e}", path.display())))?;
        if sha256_hex(&bytes) != record.sha256 {
            return Err(corrupt("checksum mismatch".into()));
        }
        let image = image::load_from_memory(&bytes)
            .map_err(|e| corrupt(format!("decode failed: {e}")))?
            .into_luma8();
        if image.dimensions() != (w as u32, h as u32) {
            return Err(corrupt(format!("image is {:?}, expected {w}x{h}", image.dimensions())));
        }
        samples.push(Sample {
            record: record.clone(),
            pixels: image.as_raw().iter().map(|&p| p as f32 / 255.0).collect(),
        });
    }
    Ok(Dataset {
        manifest,
        root,
        samples,
    })
}
