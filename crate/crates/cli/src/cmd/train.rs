use std::path::{Path, PathBuf};

use log::info;
use serde::Serialize;
use tfjam::classify::{train_model, ModelKind, TrainOptions};
use tfjam::dataset::{load_dataset, Split};

use super::{log_resolved, parse, write};
use crate::config::{invalid, usage, TrainArgs};

fn history_path(model: &Path) -> PathBuf {
    let mut name = model.file_name().unwrap_or_default().to_os_string();
    name.push(".history.csv");
    model.with_file_name(name)
}

pub fn run(args: TrainArgs) -> anyhow::Result<()> {
    let manifest = args
        .manifest
        .ok_or_else(|| usage("train needs --manifest <dataset>/manifest.json"))?;
    let kind: ModelKind = parse("model", args.model.as_deref().unwrap_or("cnn"))?;
    let out = args
        .out
        .unwrap_or_else(|| PathBuf::from(format!("{}.model", kind.name())));
    let history = args.history.unwrap_or_else(|| history_path(&out));

    let mut opts = TrainOptions::default();
    let cnn = &mut opts.cnn;
    macro_rules! set {
        ($($dst:expr => $src:expr),* $(,)?) => { $(if let Some(v) = $src { $dst = v; })* };
    }
    set!(
        opts.k => args.k,
        opts.feature_grid => args.feature_grid,
        opts.val_fraction => args.val_fraction,
        cnn.batch_size => args.batch_size,
        cnn.learning_rate => args.learning_rate,
        cnn.max_epochs => args.max_epochs,
        cnn.patience => args.patience,
        cnn.lr_decay => args.lr_decay,
        cnn.seed => args.seed,
    );
    opts.cnn.validate().map_err(invalid)?;
    if !(0.0..1.0).contains(&opts.val_fraction) {
        return Err(usage(format!(
            "--val-fraction must be in [0, 1), got {}",
            opts.val_fraction
        )));
    }
    if opts.k == 0 || opts.feature_grid == 0 {
        return Err(usage("--k and --feature-grid must be positive"));
    }

    #[derive(Serialize)]
    struct Resolved<'a> {
        manifest: &'a Path,
        model: &'static str,
        out: &'a Path,
        history: Option<&'a Path>,
        options: &'a TrainOptions,
    }
    log_resolved(
        "train",
        &Resolved {
            manifest: &manifest,
            model: kind.name(),
            out: &out,
            history: (kind == ModelKind::Cnn).then_some(history.as_path()),
            options: &opts,
        },
    )?;
    info!("training seed {}", opts.cnn.seed);

    let dataset = load_dataset(&manifest)?;
    let n_train = dataset.split(Split::Train).len();
    info!("loaded {n_train} training samples from {}", manifest.display());
    let model = train_model(&dataset, kind, &opts)?;
    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)?;
    }
    model.save(&out)?;
    println!("wrote {}", out.display());
    if let Some(h) = &model.metadata.history {
        write(&history, h.to_csv())?;
        println!("wrote {}", history.display());
        if let Some(best) = h.epochs.iter().find(|e| e.epoch == h.best_epoch) {
            println!(
                "{} epochs, kept epoch {} (validation accuracy {:.3}){}",
                h.epochs.len(),
                h.best_epoch,
                best.val_accuracy,
                if h.stopped_early { ", stopped early" } else { "" }
            );
        }
    }
    Ok(())
}
