use std::path::PathBuf;

use log::info;
use serde::Serialize;
use tfjam::dataset::{clean_signal, encode_png, received_signal, SweepConfig, FIXED_JSR_DB};
use tfjam::synthesis::{SignalClass, SignalSpec, SynthesisProfile};
use tfjam::tfa::{to_image, TfMethod, WindowConfig};
use tfjam::{ChannelModel, VERSION};

use super::{apply_channel_arg, apply_image_args, log_resolved, parse, write};
use crate::config::{invalid, usage, SynthArgs};

#[derive(Serialize)]
struct Resolved {
    class: SignalClass,
    seed: u64,
    out: PathBuf,
    spectrogram: Option<PathBuf>,
    jsr_db: f64,
    snr_db: Option<f64>,
    channel: Option<ChannelModel>,
    profile: SynthesisProfile,
    tf_method: TfMethod,
    windows: WindowConfig,
    n_freq_bins: usize,
    image_size: (usize, usize),
}

/// JSON written next to the IQ file.
#[derive(Serialize)]
struct Sidecar<'a> {
    generator: &'static str,
    /// Interleaved I/Q, little-endian 32-bit floats.
    format: &'static str,
    n_samples: usize,
    sample_rate: f64,
    config: &'a Resolved,
    spec: &'a SignalSpec,
}

pub fn run(args: SynthArgs) -> anyhow::Result<()> {
    let class_arg = args
        .class
        .ok_or_else(|| usage("synth needs --class (e.g. --class fh)"))?;
    let class: SignalClass = parse("class", &class_arg)?;
    let seed = args.seed.unwrap_or(0);

    let mut cfg = SweepConfig::default();
    apply_image_args(&mut cfg, &args.image)?;
    apply_channel_arg(&mut cfg, &args.channel)?;
    if let Some(fs) = args.sample_rate {
        cfg.profile.sample_rate = fs;
    }
    cfg.profile.validate().map_err(invalid)?;
    if let Some(s) = args.snr.filter(|s| !s.is_finite()) {
        return Err(usage(format!("--snr must be finite, got {s}")));
    }
    let jsr_db = args.jsr.unwrap_or(FIXED_JSR_DB);
    if !jsr_db.is_finite() {
        return Err(usage(format!("--jsr must be finite, got {jsr_db}")));
    }

    let out = args
        .out
        .unwrap_or_else(|| PathBuf::from(format!("{}-seed{seed}.iq", class.slug())));
    let resolved = Resolved {
        class,
        seed,
        spectrogram: args.spectrogram.unwrap_or(false).then(|| out.with_extension("png")),
        out,
        jsr_db,
        snr_db: args.snr,
        channel: args.snr.map(|_| cfg.channel.clone()),
        profile: cfg.profile.clone(),
        tf_method: cfg.tf_method,
        windows: cfg.windows,
        n_freq_bins: cfg.n_freq_bins,
        image_size: cfg.image_size,
    };
    log_resolved("synth", &resolved)?;

    let (signal, spec) = match args.snr {
        Some(snr) => received_signal(&cfg.profile, &cfg.channel, class, snr, jsr_db, seed),
        None => clean_signal(&cfg.profile, class, jsr_db, seed),
    }
    .map_err(invalid)?;

    let mut iq = Vec::with_capacity(signal.len() * 8);
    for c in signal.samples() {
        iq.extend_from_slice(&(c.re as f32).to_le_bytes());
        iq.extend_from_slice(&(c.im as f32).to_le_bytes());
    }
    write(&resolved.out, &iq)?;
    let sidecar = Sidecar {
        generator: VERSION,
        format: "cf32le",
        n_samples: signal.len(),
        sample_rate: signal.sample_rate(),
        config: &resolved,
        spec: &spec,
    };
    let meta_path = resolved.out.with_extension("json");
    write(&meta_path, serde_json::to_string_pretty(&sidecar)? + "\n")?;
    info!(
        "wrote {} ({} samples) and {}",
        resolved.out.display(),
        signal.len(),
        meta_path.display()
    );

    if let Some(png) = &resolved.spectrogram {
        let grid = cfg
            .tf_method
            .compute(&signal, &cfg.windows.to_spec()?, cfg.n_freq_bins)?;
        let image = to_image(&grid, cfg.image_size.0, cfg.image_size.1)?;
        write(png, encode_png(&image)?)?;
        info!("wrote {}", png.display());
    }
    println!("{}", resolved.out.display());
    Ok(())
}
