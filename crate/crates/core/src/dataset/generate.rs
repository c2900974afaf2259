use std::collections::HashMap;
use std::fs;
use std::io::Cursor;
use std::path::Path;

use image::{GrayImage, ImageFormat};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{Split, SweepConfig};
use super::seed::{child_seed, sha256_hex};
use crate::channel::{apply_channel, Channel, ChannelModel};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, seeded};
use crate::series::ComplexSeries;
use crate::synthesis::{SignalClass, SignalSpec, SynthesisProfile};
use crate::tfa::{analytic_signal, to_image};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const PARTIAL_MARKER: &str = "manifest.partial.json";
pub const IMAGE_DIR: &str = "images";
pub const SCHEMA_VERSION: u32 = 1;

const SYNTH_STREAM: u64 = 10;
const CHANNEL_STREAM: u64 = 11;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub id: String,
    pub class: SignalClass,
    /// Closed-set label index; `None` for novel classes.
    pub label: Option<usize>,
    pub snr_db: f64,
    pub jsr_db: f64,
    pub channel: String,
    pub seed: u64,
    /// SHA-256 of the JSON-encoded signal description.
    pub spec_digest: String,
    /// Relative to the manifest directory.
    pub path: String,
    pub sha256: String,
    pub split: Split,
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub schema_version: u32,
    pub generator: String,
    pub config: SweepConfig,
    pub records: Vec<SampleRecord>,
}

impl DatasetManifest {
    pub fn split(&self, split: Split) -> impl Iterator<Item = &SampleRecord> {
        self.records.iter().filter(move |r| r.split == split)
    }

    /// Counts per (class, snr, jsr, split) match the config, and seeds are unique.
    pub fn check_integrity(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::invalid(format!(
                "manifest schema version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        let mut seeds: HashMap<u64, &str> = HashMap::new();
        let mut counts: HashMap<(SignalClass, u64, u64, Split), usize> = HashMap::new();
        for r in &self.records {
            if let Some(first) = seeds.insert(r.seed, &r.id) {
                return Err(Error::SeedCollision {
                    first: first.to_string(),
                    second: r.id.clone(),
                });
            }
            *counts
                .entry((r.class, r.snr_db.to_bits(), r.jsr_db.to_bits(), r.split))
                .or_default() += 1;
        }
        let cfg = &self.config;
        for &class in &cfg.classes {
            for (snr, jsr) in cfg.cells() {
                for (split, want) in [(Split::Train, cfg.train_per_cell), (Split::Test, cfg.test_per_cell)] {
                    let got = counts
                        .get(&(class, snr.to_bits(), jsr.to_bits(), split))
                        .copied()
                        .unwrap_or(0);
                    if got != want {
                        return Err(Error::invalid(format!(
                            "{} cell (snr {snr}, jsr {jsr}, {}) has {got} records, config says {want}",
                            class.slug(),
                            split.tag()
                        )));
                    }
                }
            }
        }
        if counts.values().sum::<usize>() != self.records.len() {
            return Err(Error::invalid("manifest contains records outside the configured grid"));
        }
        Ok(())
    }
}

/// Coordinates of one sample before it is rendered.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePlan {
    pub class: SignalClass,
    pub snr_db: f64,
    pub jsr_db: f64,
    pub split: Split,
    pub index: usize,
    pub seed: u64,
}

impl SamplePlan {
    pub fn id(&self) -> String {
        format!(
            "{}-{}-snr{:+}-jsr{:+}-{:05}",
            self.split.tag(),
            self.class.slug(),
            self.snr_db,
            self.jsr_db,
            self.index
        )
    }
}

/// Every sample of the sweep in a fixed order, with collision-checked seeds.
pub fn plan_samples(cfg: &SweepConfig) -> Result<Vec<SamplePlan>> {
    cfg.validate()?;
    let mut plans = Vec::new();
    for &class in &cfg.classes {
        for (snr_db, jsr_db) in cfg.cells() {
            for (split, n) in [(Split::Train, cfg.train_per_cell), (Split::Test, cfg.test_per_cell)] {
                for index in 0..n {
                    let seed = child_seed(cfg.master_seed, class, snr_db, jsr_db, index, split);
                    plans.push(SamplePlan {
                        class,
                        snr_db,
                        jsr_db,
                        split,
                        index,
                        seed,
                    });
                }
            }
        }
    }
    let mut seen: HashMap<u64, usize> = HashMap::with_capacity(plans.len());
    for (i, p) in plans.iter().enumerate() {
        if let Some(j) = seen.insert(p.seed, i) {
            return Err(Error::SeedCollision {
                first: plans[j].id(),
                second: p.id(),
            });
        }
    }
    Ok(plans)
}

/// Draws the spec for `class` and returns the analytic, noise-free frame
/// mixed at `jsr_db`.
pub fn clean_signal(
    profile: &SynthesisProfile,
    class: SignalClass,
    jsr_db: f64,
    seed: u64,
) -> Result<(ComplexSeries<f64>, SignalSpec)> {
    let spec = SignalSpec::draw(class, profile, &mut seeded(seed))?;
    let x = spec.synthesize::<f64>(jsr_db, derive_seed(seed, SYNTH_STREAM))?;
    Ok((analytic_signal(&x), spec))
}

/// [`clean_signal`] passed through `channel` at `snr_db`.
pub fn received_signal(
    profile: &SynthesisProfile,
    channel: &ChannelModel,
    class: SignalClass,
    snr_db: f64,
    jsr_db: f64,
    seed: u64,
) -> Result<(ComplexSeries<f64>, SignalSpec)> {
    let (analytic, spec) = clean_signal(profile, class, jsr_db, seed)?;
    let y = apply_channel(
        &analytic,
        &Channel::new(channel.clone(), snr_db),
        derive_seed(seed, CHANNEL_STREAM),
    )?;
    Ok((y, spec))
}

/// Renders one sample: draw → synthesize (mixing at JSR) → analytic → channel
/// → distribution → image.
pub fn render_sample(
    cfg: &SweepConfig,
    class: SignalClass,
    snr_db: f64,
    jsr_db: f64,
    seed: u64,
) -> Result<(GrayImage, SignalSpec)> {
    let (y, spec) = received_signal(&cfg.profile, &cfg.channel, class, snr_db, jsr_db, seed)?;
    let grid = cfg.tf_method.compute(&y, &cfg.windows.to_spec()?, cfg.n_freq_bins)?;
    let image = to_image(&grid, cfg.image_size.0, cfg.image_size.1)?;
    Ok((image, spec))
}

pub fn encode_png(image: &GrayImage) -> Result<Vec<u8>> {
    let mut buf = Cursor::new(Vec::new());
    image.write_to(&mut buf, ImageFormat::Png)?;
    Ok(buf.into_inner())
}

fn spec_digest(spec: &SignalSpec) -> Result<String> {
    Ok(sha256_hex(serde_json::to_string(spec)?.as_bytes()))
}

/// Generates every sample in parallel, writes `images/*.png` and
/// `manifest.json` under `out_dir`. On failure a `manifest.partial.json`
/// marker records the error and the samples that were written.
pub fn generate_dataset(cfg: &SweepConfig, out_dir: &Path) -> Result<DatasetManifest> {
    let plans = plan_samples(cfg)?;
    let image_dir = out_dir.join(IMAGE_DIR);
    fs::create_dir_all(&image_dir).map_err(|e| Error::io(&image_dir, e))?;
    let _ = fs::remove_file(out_dir.join(PARTIAL_MARKER));

    let results: Vec<Result<SampleRecord>> = plans
        .par_iter()
        .map(|p| {
            let (image, spec) = render_sample(cfg, p.class, p.snr_db, p.jsr_db, p.seed)?;
            let bytes = encode_png(&image)?;
            let id = p.id();
            let rel = format!("{IMAGE_DIR}/{id}.png");
            let path = out_dir.join(&rel);
            fs::write(&path, &bytes).map_err(|e| Error::io(&path, e))?;
            Ok(SampleRecord {
                id,
                class: p.class,
                label: p.class.label_index(),
                snr_db: p.snr_db,
                jsr_db: p.jsr_db,
                channel: cfg.channel.tag().to_string(),
                seed: p.seed,
                spec_digest: spec_digest(&spec)?,
                path: rel,
                sha256: sha256_hex(&bytes),
                split: p.split,
                index: p.index,
            })
        })
        .collect();

    let mut records = Vec::with_capacity(results.len());
    let mut first_error = None;
    for r in results {
        match r {
            Ok(rec) => records.push(rec),
            Err(e) if first_error.is_none() => first_error = Some(e),
            Err(_) => {}
        }
    }
    records.sort_by(|a, b| a.id.cmp(&b.id));
    let manifest = DatasetManifest {
        schema_version: SCHEMA_VERSION,
        generator: crate::VERSION.to_string(),
        config: cfg.clone(),
        records,
    };
    if let Some(err) = first_error {
        let marker = serde_json::json!({
            "error": err.to_string(),
            "completed": manifest.records.len(),
            "planned": plans.len(),
            "manifest": manifest,
        });
        let path = out_dir.join(PARTIAL_MARKER);
        // The original error is more useful than a failure to write the marker.
        let _ = fs::write(&path, serde_json::to_vec_pretty(&marker)?);
        return Err(err);
    }
    let path = out_dir.join(MANIFEST_FILE);
    let mut json = serde_json::to_vec_pretty(&manifest)?;
    json.push(b'\n');
    fs::write(&path, json).map_err(|e| Error::io(&path, e))?;
    Ok(manifest)
}
