pub mod dataset;
pub mod eval;
pub mod novel;
pub mod synth;
pub mod train;

use std::fs;
use std::path::Path;
use std::str::FromStr;

use anyhow::Context;
use log::{info, warn};
use serde::Serialize;
use tfjam::dataset::{sha256_hex, SweepConfig};
use tfjam::tfa::TfMethod;

use crate::config::{invalid, parse_channel, usage, window_len, ImageArgs};

pub fn parse<T>(what: &str, s: &str) -> anyhow::Result<T>
where
    T: FromStr<Err = tfjam::Error>,
{
    s.parse().map_err(|e: tfjam::Error| usage(format!("--{what}: {e}")))
}

pub fn log_resolved(command: &str, resolved: &impl Serialize) -> anyhow::Result<()> {
    info!("{command}: resolved config {}", serde_json::to_string(resolved)?);
    Ok(())
}

pub fn write(path: &Path, bytes: impl AsRef<[u8]>) -> anyhow::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    }
    fs::write(path, bytes).with_context(|| format!("cannot write {}", path.display()))
}

pub fn sha256_file(path: &Path) -> anyhow::Result<String> {
    let bytes = fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    Ok(sha256_hex(&bytes))
}

/// Plots are a convenience; failing to write one only warns.
pub fn save_plot(img: &image::RgbImage, path: &Path) {
    match img.save(path) {
        Ok(()) => info!("wrote {}", path.display()),
        Err(e) => warn!("skipping plot {}: {e}", path.display()),
    }
}

/// Applies the rendering flags that were set on top of `cfg`.
pub fn apply_image_args(cfg: &mut SweepConfig, image: &ImageArgs) -> anyhow::Result<()> {
    if let Some(m) = &image.tf_method {
        cfg.tf_method = parse::<TfMethod>("tf-method", m)?;
    }
    if let Some(t) = image.time_window {
        cfg.windows.time_len = window_len(t);
    }
    if let Some(l) = image.lag_window {
        cfg.windows.lag_len = window_len(l);
    }
    if let Some(f) = image.freq_bins {
        cfg.n_freq_bins = f;
    }
    if let Some(s) = image.image_size {
        cfg.image_size = (s, s);
    }
    cfg.windows.to_spec().map_err(invalid)?;
    Ok(())
}

pub fn apply_channel_arg(cfg: &mut SweepConfig, channel: &Option<String>) -> anyhow::Result<()> {
    if let Some(c) = channel {
        cfg.channel = parse_channel(c)?;
    }
    Ok(())
}

pub fn parse_split(s: Option<&str>) -> anyhow::Result<tfjam::dataset::Split> {
    use tfjam::dataset::Split;
    match s.unwrap_or("test") {
        "test" => Ok(Split::Test),
        "train" => Ok(Split::Train),
        other => Err(usage(format!("--split: unknown split '{other}' (train, test)"))),
    }
}
