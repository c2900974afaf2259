use std::path::Path;

use log::info;
use serde::Serialize;
use tfjam::classify::{evaluate_model, novelty_report, ClassifierModel, EvalReport, GroupKey, NoveltyReport};
use tfjam::dataset::{load_dataset, Split};
use tfjam::VERSION;

use super::{log_resolved, parse, parse_split, save_plot, sha256_file, write};
use crate::config::{usage, EvalArgs};
use crate::plot;

/// Settings that determine the report's content. Paths are replaced by
/// digests so reruns from other directories stay byte-identical.
#[derive(Serialize)]
struct ReportConfig {
    model_sha256: String,
    manifest_sha256: String,
    split: Split,
    group: GroupKey,
    novel_threshold: Option<f64>,
}

#[derive(Serialize)]
struct ReportFile<'a> {
    generator: &'static str,
    config: &'a ReportConfig,
    report: &'a EvalReport,
    novelty: Option<&'a NoveltyReport>,
}

pub fn run(args: EvalArgs) -> anyhow::Result<()> {
    let model_path = args.model.ok_or_else(|| usage("eval needs --model <file>"))?;
    let manifest = args
        .manifest
        .ok_or_else(|| usage("eval needs --manifest <dataset>/manifest.json"))?;
    let out_dir = args.out_dir.ok_or_else(|| usage("eval needs --out-dir"))?;
    let split = parse_split(args.split.as_deref())?;
    let group: GroupKey = parse("group", args.group.as_deref().unwrap_or("snr"))?;
    if let Some(t) = args.novel_threshold.filter(|t| !(0.0..=1.0).contains(t)) {
        return Err(usage(format!("--novel-threshold must be in [0, 1], got {t}")));
    }

    let config = ReportConfig {
        model_sha256: sha256_file(&model_path)?,
        manifest_sha256: sha256_file(&manifest)?,
        split,
        group,
        novel_threshold: args.novel_threshold,
    };
    #[derive(Serialize)]
    struct Resolved<'a> {
        model: &'a Path,
        manifest: &'a Path,
        out_dir: &'a Path,
        #[serde(flatten)]
        config: &'a ReportConfig,
    }
    log_resolved(
        "eval",
        &Resolved {
            model: &model_path,
            manifest: &manifest,
            out_dir: &out_dir,
            config: &config,
        },
    )?;

    let model = ClassifierModel::load(&model_path)?;
    let dataset = load_dataset(&manifest)?;
    let report = evaluate_model(&model, &dataset, split, group)?;
    let novelty = match args.novel_threshold {
        Some(t) => Some(novelty_report(&model, dataset.split(split), t, group)?),
        None => None,
    };

    write(&out_dir.join("curve.csv"), report.curve_csv())?;
    write(&out_dir.join("per_class.csv"), report.per_class_csv())?;
    write(&out_dir.join("confusion.csv"), report.confusion_csv())?;
    if let Some(n) = &novelty {
        write(&out_dir.join("novelty.csv"), n.to_csv())?;
    }
    let file = ReportFile {
        generator: VERSION,
        config: &config,
        report: &report,
        novelty: novelty.as_ref(),
    };
    write(
        &out_dir.join("report.json"),
        serde_json::to_string_pretty(&file)? + "\n",
    )?;
    info!("wrote reports under {}", out_dir.display());

    if !report.groups.is_empty() {
        let points: Vec<(f64, f64)> = report.groups.iter().map(|g| (g.value, g.accuracy)).collect();
        save_plot(&plot::accuracy_curve(&points), &out_dir.join("curve.png"));
    }
    save_plot(
        &plot::confusion_heatmap(&report.confusion),
        &out_dir.join("confusion.png"),
    );

    println!(
        "{} accuracy {:.4} on {} {} samples",
        report.model,
        report.accuracy,
        report.n_samples,
        split.tag()
    );
    for g in &report.groups {
        println!(
            "  {:?} {:>6}: {:.4} ({}/{})",
            group, g.value, g.accuracy, g.correct, g.count
        );
    }
    if let Some(n) = &novelty {
        println!(
            "novelty at threshold {}: novel-class flag rate {:.4}, known-class flag rate {:.4}",
            n.threshold,
            n.novel_flag_rate(),
            n.false_novel_rate()
        );
    }
    Ok(())
}
