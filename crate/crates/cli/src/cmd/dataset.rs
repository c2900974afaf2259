use std::collections::BTreeMap;

use log::{info, warn};
use serde::Serialize;
use tfjam::dataset::{generate_dataset, Split, SweepConfig, MANIFEST_FILE};
use tfjam::synthesis::SignalClass;

use super::{apply_channel_arg, apply_image_args, log_resolved, parse};
use crate::config::{invalid, usage, DatasetArgs};

/// Sample count above which a run is flagged as long (desk scale is 1350).
const LONG_RUN_SAMPLES: usize = 20_000;
/// Measured single-core rendering cost of one default sample.
const SECONDS_PER_SAMPLE: f64 = 0.015;

fn preset(name: &str) -> anyhow::Result<SweepConfig> {
    match name {
        "desk" => Ok(SweepConfig::default()),
        "paper" => Ok(SweepConfig::paper_scale()),
        "jsr-sweep" => Ok(SweepConfig::jsr_sweep()),
        other => Err(usage(format!("unknown preset '{other}' (desk, paper, jsr-sweep)"))),
    }
}

pub fn run(args: DatasetArgs) -> anyhow::Result<()> {
    let out_dir = args
        .out_dir
        .ok_or_else(|| usage("dataset needs --out-dir (or out_dir in the [dataset] config section)"))?;
    let mut cfg = preset(args.preset.as_deref().unwrap_or("desk"))?;
    if let Some(classes) = &args.classes {
        cfg.classes = classes
            .iter()
            .map(|c| parse::<SignalClass>("classes", c))
            .collect::<anyhow::Result<_>>()?;
    }
    if let Some(snr) = args.snr {
        cfg.snr_grid_db = snr;
    }
    if let Some(jsr) = args.jsr {
        cfg.jsr_grid_db = jsr;
    }
    apply_channel_arg(&mut cfg, &args.channel)?;
    if let Some(n) = args.train_per_cell {
        cfg.train_per_cell = n;
    }
    if let Some(n) = args.test_per_cell {
        cfg.test_per_cell = n;
    }
    if let Some(s) = args.seed {
        cfg.master_seed = s;
    }
    apply_image_args(&mut cfg, &args.image)?;
    cfg.validate().map_err(invalid)?;

    #[derive(Serialize)]
    struct Resolved<'a> {
        out_dir: &'a std::path::Path,
        sweep: &'a SweepConfig,
    }
    log_resolved(
        "dataset",
        &Resolved {
            out_dir: &out_dir,
            sweep: &cfg,
        },
    )?;
    info!("master seed {}", cfg.master_seed);

    let (n_train, n_test) = (cfg.count(Split::Train), cfg.count(Split::Test));
    if n_train + n_test >= LONG_RUN_SAMPLES {
        let n = n_train + n_test;
        warn!(
            "paper-scale run: {n} samples, roughly {:.0} core-minutes of rendering plus a long training run",
            n as f64 * SECONDS_PER_SAMPLE / 60.0
        );
    }

    if args.dry_run.unwrap_or(false) {
        println!("dry run: train {n_train}, test {n_test}; nothing written");
        return Ok(());
    }
    let manifest = generate_dataset(&cfg, &out_dir)?;
    let mut per_class: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    for r in &manifest.records {
        let e = per_class.entry(r.class.slug()).or_default();
        match r.split {
            Split::Train => e.0 += 1,
            Split::Test => e.1 += 1,
        }
    }
    println!("wrote {}", out_dir.join(MANIFEST_FILE).display());
    println!("train {n_train}, test {n_test}");
    for (class, (train, test)) in per_class {
        println!("  {class:<20} train {train:>6}  test {test:>6}");
    }
    Ok(())
}
